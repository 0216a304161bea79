//! Deterministic simulator of a specified app.
//!
//! The simulator plays three roles: it is explored depth-first to produce the
//! dynamic GUI model, it replays action sequences as a reproduction oracle, and
//! it records user traces.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gui_model::{
    screens_equal, ActionKind, GuiModel, Provenance, ScreenSnapshot, WidgetNode, ROTATE_ETYPE,
    ROTATE_ID,
};
use crate::spec::{AppSpec, ElementSpec};
use crate::traces::TraceTuple;

/// Default cap on executed actions during exploration.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// Text entered into every editable element during exploration.
pub const EXPLORATION_TEXT: &str = "Test";

/// One GUI action addressed to an element by (screen, id).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimAction {
    pub screen: String,
    pub a_type: ActionKind,
    pub element: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
}

impl SimAction {
    pub fn new(screen: &str, a_type: ActionKind, element: &str) -> Self {
        SimAction {
            screen: screen.to_string(),
            a_type,
            element: element.to_string(),
            param: None,
        }
    }

    pub fn with_param(mut self, param: &str) -> Self {
        self.param = Some(param.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppState {
    pub current_screen: String,
    /// (screen, element id) → entered text.
    pub field_values: BTreeMap<(String, String), String>,
    pub visited: BTreeSet<String>,
    pub failure_flags: BTreeSet<String>,
    /// Items appended to containers at runtime, keyed by (screen, container id).
    appended: BTreeMap<(String, String), Vec<ElementSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub final_screen: String,
    pub triggered_failures: BTreeSet<String>,
    pub rejected_at: Option<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Spec(#[from] crate::gui_model::GuiModelError),
    #[error("exploration budget of {0} steps exceeded")]
    BudgetExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Executed { screen: String },
    Rejected,
}

pub struct Simulator<'a> {
    spec: &'a AppSpec,
    state: AppState,
    executed: Vec<SimAction>,
    /// Per failure, how many trigger steps have been matched so far.
    progress: Vec<usize>,
    trace: Vec<TraceTuple>,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a AppSpec) -> Self {
        let mut sim = Simulator {
            spec,
            state: AppState {
                current_screen: spec.initial_screen.clone(),
                field_values: BTreeMap::new(),
                visited: BTreeSet::new(),
                failure_flags: BTreeSet::new(),
                appended: BTreeMap::new(),
            },
            executed: Vec::new(),
            progress: vec![0; spec.failures.len()],
            trace: Vec::new(),
        };
        sim.restart();
        sim
    }

    /// Relaunches the app on its initial screen with fresh data.
    pub fn restart(&mut self) {
        self.state.current_screen = self.spec.initial_screen.clone();
        self.state.field_values.clear();
        self.state.appended.clear();
        self.state.visited.insert(self.spec.initial_screen.clone());
    }

    pub fn state(&self) -> &AppState {
        &self.state
    }

    pub fn current_screen(&self) -> &str {
        &self.state.current_screen
    }

    /// Actions executed since construction, across restarts.
    pub fn executed(&self) -> &[SimAction] {
        &self.executed
    }

    /// Trace tuples recorded for every executed action.
    pub fn trace(&self) -> &[TraceTuple] {
        &self.trace
    }

    /// Elements currently on screen, container items included.
    fn visible_elements(&self) -> Vec<ElementSpec> {
        let Some(screen) = self.spec.screen(&self.state.current_screen) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for el in screen.all_elements() {
            out.push(el.clone());
            if el.container {
                let key = (screen.name.clone(), el.id.clone());
                if let Some(items) = self.state.appended.get(&key) {
                    out.extend(items.iter().cloned());
                }
            }
        }
        out
    }

    pub fn snapshot(&self) -> ScreenSnapshot {
        fn node(el: &ElementSpec, extra: &[ElementSpec]) -> WidgetNode {
            let mut children: Vec<WidgetNode> =
                el.children.iter().map(|c| node(c, &[])).collect();
            children.extend(extra.iter().map(|c| node(c, &[])));
            WidgetNode {
                id: el.id.clone(),
                etype: el.etype.clone(),
                text: el.text.clone(),
                container: el.container,
                children,
            }
        }
        let screen = self
            .spec
            .screen(&self.state.current_screen)
            .expect("current screen is declared");
        let nodes = screen
            .elements
            .iter()
            .map(|el| {
                let key = (screen.name.clone(), el.id.clone());
                let extra = self.state.appended.get(&key).map(Vec::as_slice).unwrap_or(&[]);
                node(el, extra)
            })
            .collect();
        ScreenSnapshot {
            window: screen.name.clone(),
            nodes,
        }
    }

    /// Executes one action. Actions on elements absent from the current
    /// screen are rejected and leave the state unchanged.
    pub fn step(&mut self, action: &SimAction) -> StepResult {
        if action.screen != self.state.current_screen {
            return StepResult::Rejected;
        }
        let screen = self.state.current_screen.clone();
        let (etype, next_screen, appends) = if action.element == ROTATE_ID {
            if action.a_type != ActionKind::Rotate {
                return StepResult::Rejected;
            }
            (ROTATE_ETYPE.to_string(), screen.clone(), None)
        } else {
            let visible = self.visible_elements();
            let Some(el) = visible.iter().find(|e| e.id == action.element) else {
                return StepResult::Rejected;
            };
            // Undeclared actions are accepted but have no effect.
            let declared = el.actions.iter().find(|a| a.a_type == action.a_type);
            let next = declared
                .and_then(|a| a.target_screen.clone())
                .unwrap_or_else(|| screen.clone());
            (
                el.etype.clone(),
                next,
                declared.and_then(|a| a.appends.clone()),
            )
        };

        if action.a_type == ActionKind::Type {
            self.state.field_values.insert(
                (screen.clone(), action.element.clone()),
                action.param.clone().unwrap_or_default(),
            );
        }
        if let Some(app) = appends {
            let items = self
                .state
                .appended
                .entry((screen.clone(), app.container.clone()))
                .or_default();
            items.push(app.element);
        }
        self.trace.push(TraceTuple {
            s_name: screen.clone(),
            a_type: action.a_type,
            e_type: etype,
            e_id: action.element.clone(),
        });
        self.executed.push(action.clone());
        self.match_failures(action);
        self.state.current_screen = next_screen.clone();
        self.state.visited.insert(next_screen.clone());
        StepResult::Executed {
            screen: next_screen,
        }
    }

    fn match_failures(&mut self, action: &SimAction) {
        for (i, f) in self.spec.failures.iter().enumerate() {
            let p = self.progress[i];
            if p >= f.trigger.len() {
                continue;
            }
            let want = &f.trigger[p];
            let hit = want.screen == action.screen
                && want.a_type == action.a_type
                && want.element == action.element
                && want
                    .param
                    .as_ref()
                    .is_none_or(|v| action.param.as_deref() == Some(v.as_str()));
            if hit {
                self.progress[i] += 1;
                if self.progress[i] == f.trigger.len() {
                    self.state.failure_flags.insert(f.id.clone());
                }
            }
        }
    }
}

/// Runs `actions` from a fresh start and reports where the app ended up,
/// which failures fired, and the first rejected action if any.
pub fn replay(spec: &AppSpec, actions: &[SimAction]) -> ReplayOutcome {
    let mut sim = Simulator::new(spec);
    let mut rejected_at = None;
    for (i, a) in actions.iter().enumerate() {
        if sim.step(a) == StepResult::Rejected {
            rejected_at = Some(i);
            break;
        }
    }
    ReplayOutcome {
        final_screen: sim.state.current_screen.clone(),
        triggered_failures: sim.state.failure_flags.clone(),
        rejected_at,
    }
}

/// Model of the declared-only part of the app: every screen, plus the
/// elements and transitions that runtime exploration cannot reach.
pub fn extract_declared_model(spec: &AppSpec) -> Result<GuiModel, SimError> {
    spec.validate()?;
    let mut gm = GuiModel::new(&spec.app_id, &spec.initial_screen, Provenance::Static);
    for s in &spec.screens {
        gm.add_screen(&s.name, s.screenshot.clone(), Provenance::Static);
    }
    for s in &spec.screens {
        let sid = gm.screen_id(&s.name).expect("added above");
        for el in s.all_elements() {
            let declared: Vec<_> = el.actions.iter().filter(|a| a.declared_only).collect();
            if declared.is_empty() {
                continue;
            }
            let eid = gm.add_element(sid, &el.id, &el.etype, &el.text, el.screenshot.clone());
            for a in declared {
                let target = a
                    .target_screen
                    .as_deref()
                    .and_then(|t| gm.screen_id(t))
                    .unwrap_or(sid);
                gm.add_transition(eid, target, a.a_type, Provenance::Static);
            }
        }
    }
    Ok(gm)
}

#[derive(Debug, Clone)]
struct Pending {
    action: SimAction,
    /// Actions that reach the state in which `action` was discovered.
    prefix: Vec<SimAction>,
}

/// Depth-first exploration from the initial screen. Every clickable element
/// is clicked and every editable element receives [`EXPLORATION_TEXT`];
/// declared-only actions are never exercised. Screen identity is decided with
/// [`screens_equal`].
pub fn explore_dft(spec: &AppSpec, step_cap: usize) -> Result<GuiModel, SimError> {
    spec.validate()?;
    let mut gm = GuiModel::new(&spec.app_id, &spec.initial_screen, Provenance::Dynamic);
    let mut sim = Simulator::new(spec);
    let mut known: Vec<ScreenSnapshot> = Vec::new();
    let mut queued: HashSet<(String, String, ActionKind)> = HashSet::new();
    let mut stack: Vec<Pending> = Vec::new();
    let mut path: Vec<SimAction> = Vec::new();
    let mut steps = 0usize;

    let screens_spec = |name: &str| spec.screen(name).expect("declared screen");
    let mut observe = |sim: &Simulator,
                       gm: &mut GuiModel,
                       known: &mut Vec<ScreenSnapshot>,
                       stack: &mut Vec<Pending>,
                       path: &[SimAction]| {
        let snap = sim.snapshot();
        if !known.iter().any(|k| screens_equal(k, &snap)) {
            known.push(snap.clone());
        }
        let screen_name = sim.current_screen().to_string();
        let sid = gm.add_screen(
            &screen_name,
            screens_spec(&screen_name).screenshot.clone(),
            Provenance::Dynamic,
        );
        let mut fresh = Vec::new();
        for el in sim.visible_elements() {
            gm.add_element(sid, &el.id, &el.etype, &el.text, el.screenshot.clone());
            for a in &el.actions {
                if a.declared_only || !matches!(a.a_type, ActionKind::Click | ActionKind::Type) {
                    continue;
                }
                if queued.insert((screen_name.clone(), el.id.clone(), a.a_type)) {
                    let mut action = SimAction::new(&screen_name, a.a_type, &el.id);
                    if a.a_type == ActionKind::Type {
                        action.param = Some(EXPLORATION_TEXT.to_string());
                    }
                    fresh.push(Pending {
                        action,
                        prefix: path.to_vec(),
                    });
                }
            }
        }
        // reversed so that popping follows declaration order
        stack.extend(fresh.into_iter().rev());
    };

    observe(&sim, &mut gm, &mut known, &mut stack, &path);
    while let Some(next) = stack.pop() {
        let present = sim.current_screen() == next.action.screen
            && sim
                .visible_elements()
                .iter()
                .any(|e| e.id == next.action.element);
        if !present {
            sim.restart();
            path.clear();
            for a in &next.prefix {
                steps += 1;
                if steps > step_cap {
                    return Err(SimError::BudgetExceeded(step_cap));
                }
                sim.step(a);
                path.push(a.clone());
            }
            if sim.current_screen() != next.action.screen {
                continue;
            }
        }
        steps += 1;
        if steps > step_cap {
            return Err(SimError::BudgetExceeded(step_cap));
        }
        let before = sim.current_screen().to_string();
        if sim.step(&next.action) == StepResult::Rejected {
            continue;
        }
        path.push(next.action.clone());
        observe(&sim, &mut gm, &mut known, &mut stack, &path);
        let after = sim.current_screen().to_string();
        if after != before {
            let src_screen = gm.screen_id(&before).expect("observed");
            let el = sim_element(spec, &before, &next.action.element, &sim);
            let eid = gm.add_element(src_screen, &el.id, &el.etype, &el.text, None);
            let target = gm.screen_id(&after).expect("observed");
            gm.add_transition(eid, target, next.action.a_type, Provenance::Dynamic);
        }
    }
    Ok(gm)
}

fn sim_element(spec: &AppSpec, screen: &str, id: &str, sim: &Simulator) -> ElementSpec {
    if let Some(e) = spec.screen(screen).and_then(|s| s.element(id)) {
        return e.clone();
    }
    // runtime container item
    sim.state
        .appended
        .iter()
        .filter(|((s, _), _)| s == screen)
        .flat_map(|(_, items)| items.iter())
        .find(|e| e.id == id)
        .cloned()
        .expect("executed element exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> AppSpec {
        AppSpec::from_json(json).unwrap()
    }

    fn cycle_spec() -> AppSpec {
        spec(
            r#"{"app_id": "cyc", "initial_screen": "A", "screens": [
              {"name": "A", "elements": [
                {"id": "to_b", "etype": "Button", "text": "B", "actions": [{"a_type": "CLICK", "target_screen": "B"}]},
                {"id": "name", "etype": "EditText", "text": "Name", "actions": [{"a_type": "TYPE"}]},
                {"id": "menu_export", "etype": "TextView", "text": "Export",
                 "actions": [{"a_type": "CLICK", "target_screen": "C", "declared_only": true}]}
              ]},
              {"name": "B", "elements": [
                {"id": "to_a", "etype": "Button", "text": "A", "actions": [{"a_type": "CLICK", "target_screen": "A"}]}
              ]},
              {"name": "C", "elements": []},
              {"name": "Orphan", "elements": []}
            ],
            "failures": [{"id": "F-demo", "trigger": [
              {"screen": "A", "a_type": "CLICK", "element": "to_b"},
              {"screen": "A", "a_type": "CLICK", "element": "to_b"}]}]}"#,
        )
    }

    /// Screens reachable by following non-declared-only actions, by brute force.
    fn reachable(spec: &AppSpec) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([spec.initial_screen.clone()]);
        loop {
            let before = seen.len();
            let mut found = Vec::new();
            for s in spec.screens.iter().filter(|s| seen.contains(&s.name)) {
                for el in s.all_elements() {
                    for a in el.actions.iter().filter(|a| !a.declared_only) {
                        found.extend(a.target_screen.clone());
                    }
                }
            }
            seen.extend(found);
            if seen.len() == before {
                return seen;
            }
        }
    }

    #[test]
    fn exploration_terminates_on_cycles() {
        let s = cycle_spec();
        let gm = explore_dft(&s, DEFAULT_STEP_CAP).unwrap();
        let screens: BTreeSet<String> = gm.screens().iter().map(|s| s.name.clone()).collect();
        assert_eq!(screens, reachable(&s));
        assert_eq!(gm.screens().len(), screens.len());
        let sig = gm.signature();
        assert!(sig.transitions.iter().any(|(k, t, a)| k.1 == "to_b" && t == "B" && *a == ActionKind::Click));
        assert!(sig.transitions.iter().any(|(k, t, a)| k.1 == "to_a" && t == "A" && *a == ActionKind::Click));
        assert!(!sig.transitions.iter().any(|(k, _, _)| k.1 == "menu_export"));
    }

    #[test]
    fn exploration_is_deterministic() {
        let s = cycle_spec();
        let a = explore_dft(&s, DEFAULT_STEP_CAP).unwrap();
        let b = explore_dft(&s, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn single_screen_without_actions() {
        let s = spec(r#"{"app_id": "x", "initial_screen": "Main", "screens": [{"name": "Main"}]}"#);
        let gm = explore_dft(&s, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(gm.screens().len(), 1);
        assert_eq!(gm.screens()[0].name, "Main");
    }

    #[test]
    fn exploration_budget_is_enforced() {
        assert_eq!(
            explore_dft(&cycle_spec(), 1).unwrap_err(),
            SimError::BudgetExceeded(1)
        );
    }

    #[test]
    fn declared_model_holds_only_declared_actions() {
        let s = cycle_spec();
        let gs = extract_declared_model(&s).unwrap();
        let sig = gs.signature();
        assert_eq!(sig.screens.len(), 4);
        let real: Vec<_> = sig
            .transitions
            .iter()
            .filter(|(_, _, a)| *a != ActionKind::Rotate)
            .collect();
        assert_eq!(real.len(), 1);
        assert_eq!(real[0].0 .1, "menu_export");
        assert_eq!(real[0].1, "C");

        let none = spec(
            r#"{"app_id": "x", "initial_screen": "A", "screens": [{"name": "A", "elements": [
                {"id": "b", "etype": "Button", "actions": [{"a_type": "CLICK"}]}]}]}"#,
        );
        let g = extract_declared_model(&none).unwrap();
        assert!(g.transitions().iter().all(|t| t.a_type == ActionKind::Rotate));
        assert!(g.elements().iter().all(|e| e.is_rotation()));
    }

    #[test]
    fn replay_empty_sequence() {
        let s = cycle_spec();
        let out = replay(&s, &[]);
        assert_eq!(out.final_screen, "A");
        assert!(out.triggered_failures.is_empty());
        assert_eq!(out.rejected_at, None);
    }

    #[test]
    fn replay_rejects_absent_element() {
        let s = cycle_spec();
        let out = replay(
            &s,
            &[
                SimAction::new("A", ActionKind::Click, "to_b"),
                SimAction::new("B", ActionKind::Click, "to_b"),
                SimAction::new("B", ActionKind::Click, "to_a"),
            ],
        );
        assert_eq!(out.rejected_at, Some(1));
        assert_eq!(out.final_screen, "B");
    }

    /// Does `pattern` occur as a (not necessarily contiguous) subsequence?
    fn brute_subsequence(stream: &[SimAction], pattern: &[SimAction]) -> bool {
        fn go(stream: &[SimAction], pattern: &[SimAction]) -> bool {
            if pattern.is_empty() {
                return true;
            }
            (0..stream.len()).any(|i| {
                stream[i].screen == pattern[0].screen
                    && stream[i].a_type == pattern[0].a_type
                    && stream[i].element == pattern[0].element
                    && go(&stream[i + 1..], &pattern[1..])
            })
        }
        go(stream, pattern)
    }

    #[test]
    fn failure_trigger_matches_brute_force() {
        let s = cycle_spec();
        let to_b = SimAction::new("A", ActionKind::Click, "to_b");
        let to_a = SimAction::new("B", ActionKind::Click, "to_a");
        let typ = SimAction::new("A", ActionKind::Type, "name").with_param("x");
        let pattern = vec![to_b.clone(), to_b.clone()];
        let alphabet = [to_b, to_a, typ];
        // every sequence over the alphabet up to length 5
        let mut seqs: Vec<Vec<SimAction>> = vec![vec![]];
        for _ in 0..5 {
            let mut next = Vec::new();
            for s in &seqs {
                for a in &alphabet {
                    let mut t = s.clone();
                    t.push(a.clone());
                    next.push(t);
                }
            }
            seqs.extend(next.into_iter().filter(|t| t.len() <= 5));
            seqs.sort_by_key(|s| s.len());
            seqs.dedup();
        }
        let mut fired = 0;
        for seq in &seqs {
            let out = replay(&s, seq);
            let executed = &seq[..out.rejected_at.unwrap_or(seq.len())];
            let expected = brute_subsequence(executed, &pattern);
            assert_eq!(out.triggered_failures.contains("F-demo"), expected, "{seq:?}");
            fired += expected as usize;
        }
        assert!(fired > 0);
    }

    #[test]
    fn replay_prefixes_of_accepted_sequences_are_accepted() {
        let s = cycle_spec();
        let seq = vec![
            SimAction::new("A", ActionKind::Type, "name").with_param("x"),
            SimAction::new("A", ActionKind::Click, "to_b"),
            SimAction::new("B", ActionKind::Click, "to_a"),
            SimAction::new("A", ActionKind::Click, "to_b"),
        ];
        assert_eq!(replay(&s, &seq).rejected_at, None);
        for k in 0..seq.len() {
            assert_eq!(replay(&s, &seq[..k]).rejected_at, None);
        }
    }

    #[test]
    fn recording_produces_trace_tuples() {
        let s = cycle_spec();
        let mut sim = Simulator::new(&s);
        sim.step(&SimAction::new("A", ActionKind::Click, "to_b"));
        sim.step(&SimAction::new("B", ActionKind::Rotate, ROTATE_ID));
        let t = sim.trace();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].to_gat_token(), "A.CLICK.Button.to_b");
        assert_eq!(t[1].to_gat_token(), "B.ROTATE.Screen.__rotate__");
    }
}
