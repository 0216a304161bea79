//! GUI model graph: screens, the elements they contain, and typed transitions
//! from elements to the screens they lead to.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::AppSpec;

/// Reserved identifier of the per-screen rotation pseudo-element.
pub const ROTATE_ID: &str = "__rotate__";
/// Element kind used for the rotation pseudo-element and rotation trace tuples.
pub const ROTATE_ETYPE: &str = "Screen";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ActionKind {
    Click,
    LongClick,
    Scroll,
    Type,
    Rotate,
    Dummy,
}

impl ActionKind {
    pub const USER_ACTIONS: [ActionKind; 5] = [
        ActionKind::Click,
        ActionKind::LongClick,
        ActionKind::Scroll,
        ActionKind::Type,
        ActionKind::Rotate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Click => "CLICK",
            ActionKind::LongClick => "LONG_CLICK",
            ActionKind::Scroll => "SCROLL",
            ActionKind::Type => "TYPE",
            ActionKind::Rotate => "ROTATE",
            ActionKind::Dummy => "DUMMY",
        }
    }

    pub fn parse(s: &str) -> Option<ActionKind> {
        Some(match s {
            "CLICK" => ActionKind::Click,
            "LONG_CLICK" => ActionKind::LongClick,
            "SCROLL" => ActionKind::Scroll,
            "TYPE" => ActionKind::Type,
            "ROTATE" => ActionKind::Rotate,
            "DUMMY" => ActionKind::Dummy,
            _ => return None,
        })
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which analysis contributed a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Static,
    Dynamic,
    Trace,
    Dummy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScreenId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementNode {
    /// Containing screen; the containment edge.
    pub screen: ScreenId,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub id: String,
    pub etype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<String>,
}

impl ElementNode {
    pub fn is_rotation(&self) -> bool {
        self.id == ROTATE_ID
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: ElementId,
    pub target: ScreenId,
    pub a_type: ActionKind,
    pub t_type: Provenance,
}

#[derive(Debug, Error, PartialEq)]
pub enum GuiModelError {
    #[error("malformed app specification: {0}")]
    Malformed(String),
    #[error("duplicate screen name `{0}`")]
    DuplicateScreen(String),
    #[error("initial screen `{0}` is not declared")]
    MissingInitial(String),
    #[error("transition from `{screen}.{element}` references undeclared screen `{target}`")]
    UndeclaredTarget {
        screen: String,
        element: String,
        target: String,
    },
    #[error("unknown screen `{0}`")]
    UnknownScreen(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Directed graph of screens and elements.
///
/// Containment is stored on the element (`ElementNode::screen`), which makes it
/// a total function from elements to screens. Transitions are element→screen.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawGuiModel", into = "RawGuiModel")]
pub struct GuiModel {
    app_id: String,
    screens: Vec<ScreenNode>,
    elements: Vec<ElementNode>,
    transitions: Vec<Transition>,
    initial_screen: ScreenId,
    screen_index: HashMap<String, ScreenId>,
}

#[derive(Serialize, Deserialize)]
struct RawGuiModel {
    app_id: String,
    initial_screen: String,
    screens: Vec<ScreenNode>,
    elements: Vec<ElementNode>,
    transitions: Vec<Transition>,
}

impl From<GuiModel> for RawGuiModel {
    fn from(gm: GuiModel) -> Self {
        RawGuiModel {
            initial_screen: gm.screens[gm.initial_screen.0].name.clone(),
            app_id: gm.app_id,
            screens: gm.screens,
            elements: gm.elements,
            transitions: gm.transitions,
        }
    }
}

impl TryFrom<RawGuiModel> for GuiModel {
    type Error = GuiModelError;

    fn try_from(raw: RawGuiModel) -> Result<Self, Self::Error> {
        let mut screen_index = HashMap::new();
        for (i, s) in raw.screens.iter().enumerate() {
            if screen_index.insert(s.name.clone(), ScreenId(i)).is_some() {
                return Err(GuiModelError::DuplicateScreen(s.name.clone()));
            }
        }
        let initial_screen = *screen_index
            .get(&raw.initial_screen)
            .ok_or_else(|| GuiModelError::MissingInitial(raw.initial_screen.clone()))?;
        let n_screens = raw.screens.len();
        if raw.elements.iter().any(|e| e.screen.0 >= n_screens) {
            return Err(GuiModelError::Invalid("element references missing screen".into()));
        }
        for t in &raw.transitions {
            if t.source.0 >= raw.elements.len() || t.target.0 >= n_screens {
                return Err(GuiModelError::Invalid("transition endpoint out of range".into()));
            }
        }
        Ok(GuiModel {
            app_id: raw.app_id,
            screens: raw.screens,
            elements: raw.elements,
            transitions: raw.transitions,
            initial_screen,
            screen_index,
        })
    }
}

/// Key used to match elements across models. Screenshots never participate.
pub type ElementKey = (String, String, String, String);

impl GuiModel {
    /// An empty model with just the initial screen (and its rotation element).
    pub fn new(app_id: impl Into<String>, initial_screen: &str, rotation: Provenance) -> Self {
        let mut gm = GuiModel::empty(app_id.into());
        gm.initial_screen = gm.add_screen(initial_screen, None, rotation);
        gm
    }

    fn empty(app_id: String) -> Self {
        GuiModel {
            app_id,
            screens: Vec::new(),
            elements: Vec::new(),
            transitions: Vec::new(),
            initial_screen: ScreenId(0),
            screen_index: HashMap::new(),
        }
    }

    /// Builds a model from every declaration in an app specification, tagging
    /// all transitions as static.
    pub fn build_from_spec(spec: &AppSpec) -> Result<GuiModel, GuiModelError> {
        spec.validate()?;
        let mut gm = GuiModel::new(&spec.app_id, &spec.initial_screen, Provenance::Static);
        for screen in &spec.screens {
            gm.add_screen(&screen.name, screen.screenshot.clone(), Provenance::Static);
        }
        for screen in &spec.screens {
            let sid = gm.screen_id(&screen.name).expect("screen just added");
            for el in screen.all_elements() {
                let eid = gm.add_element(sid, &el.id, &el.etype, &el.text, el.screenshot.clone());
                for action in &el.actions {
                    let target = match &action.target_screen {
                        Some(t) => gm.screen_id(t).expect("validated"),
                        None => sid,
                    };
                    gm.add_transition(eid, target, action.a_type, Provenance::Static);
                }
            }
        }
        Ok(gm)
    }

    pub fn app_id(&self) -> &str {
        &self.app_id
    }

    pub fn initial_screen(&self) -> ScreenId {
        self.initial_screen
    }

    pub fn screens(&self) -> &[ScreenNode] {
        &self.screens
    }

    pub fn elements(&self) -> &[ElementNode] {
        &self.elements
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn screen(&self, id: ScreenId) -> &ScreenNode {
        &self.screens[id.0]
    }

    pub fn element(&self, id: ElementId) -> &ElementNode {
        &self.elements[id.0]
    }

    pub fn screen_name(&self, id: ScreenId) -> &str {
        &self.screens[id.0].name
    }

    pub fn screen_id(&self, name: &str) -> Option<ScreenId> {
        self.screen_index.get(name).copied()
    }

    pub fn screen_ids(&self) -> impl Iterator<Item = ScreenId> {
        (0..self.screens.len()).map(ScreenId)
    }

    pub fn element_ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.elements.len()).map(ElementId)
    }

    pub fn elements_of(&self, screen: ScreenId) -> impl Iterator<Item = ElementId> + '_ {
        self.element_ids().filter(move |e| self.elements[e.0].screen == screen)
    }

    pub fn outgoing(&self, element: ElementId) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.source == element)
    }

    pub fn rotation_element(&self, screen: ScreenId) -> Option<ElementId> {
        self.elements_of(screen).find(|e| self.elements[e.0].is_rotation())
    }

    /// First element on `screen` with the given identifier and kind.
    pub fn find_element(&self, screen: ScreenId, id: &str, etype: &str) -> Option<ElementId> {
        self.elements_of(screen).find(|e| {
            let el = &self.elements[e.0];
            el.id == id && el.etype == etype
        })
    }

    pub fn element_key(&self, id: ElementId) -> ElementKey {
        let el = &self.elements[id.0];
        (
            self.screens[el.screen.0].name.clone(),
            el.id.clone(),
            el.etype.clone(),
            el.text.clone(),
        )
    }

    fn find_by_key(&self, key: &ElementKey) -> Option<ElementId> {
        let sid = self.screen_id(&key.0)?;
        self.elements_of(sid).find(|e| {
            let el = &self.elements[e.0];
            el.id == key.1 && el.etype == key.2 && el.text == key.3
        })
    }

    /// Element matching (screen, id, etype) where one side has no text, as
    /// happens for elements known only from traces.
    fn find_textless_match(&self, key: &ElementKey) -> Option<ElementId> {
        let sid = self.screen_id(&key.0)?;
        self.elements_of(sid).find(|e| {
            let el = &self.elements[e.0];
            el.id == key.1 && el.etype == key.2 && (el.text.is_empty() || key.3.is_empty())
        })
    }

    /// Adds a screen if absent and returns its id. New screens get the
    /// rotation pseudo-element with a self ROTATE transition.
    pub fn add_screen(
        &mut self,
        name: &str,
        screenshot: Option<String>,
        rotation: Provenance,
    ) -> ScreenId {
        if let Some(id) = self.screen_id(name) {
            if self.screens[id.0].screenshot.is_none() {
                self.screens[id.0].screenshot = screenshot;
            }
            return id;
        }
        let id = ScreenId(self.screens.len());
        self.screens.push(ScreenNode {
            name: name.to_string(),
            screenshot,
        });
        self.screen_index.insert(name.to_string(), id);
        let rot = self.add_element(id, ROTATE_ID, ROTATE_ETYPE, "", None);
        self.add_transition(rot, id, ActionKind::Rotate, rotation);
        id
    }

    /// Adds an element if no element with the same (screen, id, etype, text)
    /// exists; returns the matching element either way.
    pub fn add_element(
        &mut self,
        screen: ScreenId,
        id: &str,
        etype: &str,
        text: &str,
        screenshot: Option<String>,
    ) -> ElementId {
        let key = (
            self.screens[screen.0].name.clone(),
            id.to_string(),
            etype.to_string(),
            text.to_string(),
        );
        if let Some(e) = self.find_by_key(&key) {
            if screenshot.is_some() {
                self.elements[e.0].screenshot = screenshot;
            }
            return e;
        }
        let eid = ElementId(self.elements.len());
        self.elements.push(ElementNode {
            screen,
            text: text.to_string(),
            id: id.to_string(),
            etype: etype.to_string(),
            screenshot,
        });
        eid
    }

    /// Adds a transition unless an identical (source, target, a_type) edge
    /// already exists. Returns whether an edge was added.
    pub fn add_transition(
        &mut self,
        source: ElementId,
        target: ScreenId,
        a_type: ActionKind,
        t_type: Provenance,
    ) -> bool {
        let exists = self
            .transitions
            .iter()
            .any(|t| t.source == source && t.target == target && t.a_type == a_type);
        if exists {
            return false;
        }
        self.transitions.push(Transition {
            source,
            target,
            a_type,
            t_type,
        });
        true
    }

    /// Normalizes dummy edges: elements with no real transition get a self
    /// DUMMY edge, elements that gained a real transition lose theirs.
    pub fn finalize(&mut self) {
        let has_real: BTreeSet<ElementId> = self
            .transitions
            .iter()
            .filter(|t| t.a_type != ActionKind::Dummy)
            .map(|t| t.source)
            .collect();
        self.transitions
            .retain(|t| t.a_type != ActionKind::Dummy || !has_real.contains(&t.source));
        for e in 0..self.elements.len() {
            let e = ElementId(e);
            if !has_real.contains(&e) {
                let screen = self.elements[e.0].screen;
                self.add_transition(e, screen, ActionKind::Dummy, Provenance::Dummy);
            }
        }
    }

    /// Graph union of a static and a dynamic model. Nodes are matched by name
    /// (screens) and by (screen, id, etype, text) (elements), where an element
    /// without text also matches on (screen, id, etype); screenshots from
    /// the dynamic model win. Every element without a transition afterwards
    /// gets a dummy self edge.
    pub fn union(gm_s: &GuiModel, gm_d: &GuiModel) -> GuiModel {
        let initial = gm_s.screen_name(gm_s.initial_screen);
        let mut out = GuiModel::empty(gm_s.app_id.clone());
        for src in [gm_s, gm_d] {
            for s in &src.screens {
                let id = match out.screen_id(&s.name) {
                    Some(id) => id,
                    None => {
                        let id = ScreenId(out.screens.len());
                        out.screens.push(ScreenNode {
                            name: s.name.clone(),
                            screenshot: None,
                        });
                        out.screen_index.insert(s.name.clone(), id);
                        id
                    }
                };
                if s.screenshot.is_some() {
                    out.screens[id.0].screenshot = s.screenshot.clone();
                }
            }
        }
        out.initial_screen = out.screen_id(initial).expect("initial screen carried over");
        for src in [gm_s, gm_d] {
            let mut map = Vec::with_capacity(src.elements.len());
            for (i, el) in src.elements.iter().enumerate() {
                let key = src.element_key(ElementId(i));
                let sid = out.screen_id(&key.0).expect("screens merged first");
                let eid = match out.find_by_key(&key).or_else(|| out.find_textless_match(&key)) {
                    Some(e) => {
                        if out.elements[e.0].text.is_empty() {
                            out.elements[e.0].text = el.text.clone();
                        }
                        e
                    }
                    None => {
                        let e = ElementId(out.elements.len());
                        out.elements.push(ElementNode {
                            screen: sid,
                            text: el.text.clone(),
                            id: el.id.clone(),
                            etype: el.etype.clone(),
                            screenshot: None,
                        });
                        e
                    }
                };
                if el.screenshot.is_some() {
                    out.elements[eid.0].screenshot = el.screenshot.clone();
                }
                map.push(eid);
            }
            for t in &src.transitions {
                if t.a_type == ActionKind::Dummy {
                    continue;
                }
                let target = out.screen_id(src.screen_name(t.target)).expect("merged");
                out.add_transition(map[t.source.0], target, t.a_type, t.t_type);
            }
        }
        out.finalize();
        out
    }

    /// Number of transition edges on the shortest path between two screens,
    /// or `None` when `to` is unreachable from `from`.
    pub fn shortest_path_len(&self, from: ScreenId, to: ScreenId) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.screens.len()];
        for t in &self.transitions {
            let src = self.elements[t.source.0].screen;
            if src != t.target {
                adj[src.0].insert(t.target.0);
            }
        }
        let mut dist = vec![usize::MAX; self.screens.len()];
        dist[from.0] = 0;
        let mut queue = VecDeque::from([from.0]);
        while let Some(s) = queue.pop_front() {
            for &n in &adj[s] {
                if dist[n] == usize::MAX {
                    dist[n] = dist[s] + 1;
                    if n == to.0 {
                        return Some(dist[n]);
                    }
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Shortest-path distance by screen name. Unreachable screens are at
    /// distance 0.
    pub fn screen_distance(&self, from: &str, to: &str) -> Result<usize, GuiModelError> {
        let f = self
            .screen_id(from)
            .ok_or_else(|| GuiModelError::UnknownScreen(from.to_string()))?;
        let t = self
            .screen_id(to)
            .ok_or_else(|| GuiModelError::UnknownScreen(to.to_string()))?;
        Ok(self.shortest_path_len(f, t).unwrap_or(0))
    }

    /// Name-based view of the graph, used to compare models up to isomorphism.
    pub fn signature(&self) -> ModelSignature {
        ModelSignature {
            screens: self.screens.iter().map(|s| s.name.clone()).collect(),
            elements: self.element_ids().map(|e| self.element_key(e)).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    (
                        self.element_key(t.source),
                        self.screen_name(t.target).to_string(),
                        t.a_type,
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<GuiModel, GuiModelError> {
        serde_json::from_str(s).map_err(|e| GuiModelError::Malformed(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSignature {
    pub screens: BTreeSet<String>,
    pub elements: BTreeSet<ElementKey>,
    pub transitions: BTreeSet<(ElementKey, String, ActionKind)>,
}

/// Element tree captured from a running screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidgetNode {
    pub id: String,
    pub etype: String,
    pub text: String,
    pub container: bool,
    pub children: Vec<WidgetNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenSnapshot {
    /// Window (activity) name at the root of the tree.
    pub window: String,
    pub nodes: Vec<WidgetNode>,
}

fn nodes_equal(a: &[WidgetNode], b: &[WidgetNode]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.id == y.id
                && x.etype == y.etype
                && x.text == y.text
                && x.container == y.container
                && (x.container || nodes_equal(&x.children, &y.children))
        })
}

/// Two snapshots show the same screen when their trees match once the
/// children of container elements are ignored.
pub fn screens_equal(a: &ScreenSnapshot, b: &ScreenSnapshot) -> bool {
    a.window == b.window && nodes_equal(&a.nodes, &b.nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::AppSpec;

    fn two_screen_spec() -> AppSpec {
        AppSpec::from_json(
            r#"{
            "app_id": "demo",
            "initial_screen": "AccountsActivity",
            "screens": [
              {"name": "AccountsActivity", "elements": [
                {"id": "btn_new_transaction", "etype": "ImageButton",
                 "text": "Add transaction to an account",
                 "actions": [{"a_type": "CLICK", "target_screen": "TransactionsActivity"}]}
              ]},
              {"name": "TransactionsActivity", "elements": []}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn build_two_screens_with_click_transition() {
        let gm = GuiModel::build_from_spec(&two_screen_spec()).unwrap();
        assert_eq!(gm.screens().len(), 2);
        let acc = gm.screen_id("AccountsActivity").unwrap();
        let tx = gm.screen_id("TransactionsActivity").unwrap();
        let btn = gm.find_element(acc, "btn_new_transaction", "ImageButton").unwrap();
        let t: Vec<_> = gm.outgoing(btn).collect();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].a_type, ActionKind::Click);
        assert_eq!(t[0].t_type, Provenance::Static);
        assert_eq!(t[0].target, tx);
    }

    #[test]
    fn empty_screen_has_only_rotation() {
        let spec = AppSpec::from_json(
            r#"{"app_id": "x", "initial_screen": "Main", "screens": [{"name": "Main"}]}"#,
        )
        .unwrap();
        let gm = GuiModel::build_from_spec(&spec).unwrap();
        assert_eq!(gm.screens().len(), 1);
        assert_eq!(gm.elements().len(), 1);
        assert!(gm.elements()[0].is_rotation());
        let rot: Vec<_> = gm.outgoing(ElementId(0)).collect();
        assert_eq!(rot[0].a_type, ActionKind::Rotate);
        assert_eq!(rot[0].target, ScreenId(0));
    }

    #[test]
    fn undeclared_target_is_rejected() {
        let spec = AppSpec::from_json(
            r#"{"app_id": "x", "initial_screen": "Main", "screens": [{"name": "Main",
               "elements": [{"id": "b", "etype": "Button", "text": "",
                 "actions": [{"a_type": "CLICK", "target_screen": "X"}]}]}]}"#,
        )
        .unwrap();
        assert!(matches!(
            GuiModel::build_from_spec(&spec),
            Err(GuiModelError::UndeclaredTarget { target, .. }) if target == "X"
        ));
    }

    #[test]
    fn duplicate_screen_is_rejected() {
        let spec = AppSpec::from_json(
            r#"{"app_id": "x", "initial_screen": "Main",
                "screens": [{"name": "Main"}, {"name": "Main"}]}"#,
        )
        .unwrap();
        assert_eq!(
            GuiModel::build_from_spec(&spec).unwrap_err(),
            GuiModelError::DuplicateScreen("Main".into())
        );
    }

    fn model_with(screens: &[&str], elems: &[(&str, &str, Option<&str>)]) -> GuiModel {
        let mut gm = GuiModel::new("app", screens[0], Provenance::Dynamic);
        for s in screens {
            gm.add_screen(s, None, Provenance::Dynamic);
        }
        for (screen, id, shot) in elems {
            let sid = gm.screen_id(screen).unwrap();
            gm.add_element(sid, id, "Button", "", shot.map(str::to_string));
        }
        gm
    }

    #[test]
    fn union_of_disjoint_models_keeps_everything() {
        let a = model_with(&["A"], &[("A", "a1", None)]);
        let b = model_with(&["B"], &[("B", "b1", None)]);
        let u = GuiModel::union(&a, &b);
        let sig = u.signature();
        assert_eq!(sig.screens, BTreeSet::from(["A".to_string(), "B".to_string()]));
        assert!(sig.elements.contains(&("A".into(), "a1".into(), "Button".into(), "".into())));
        assert!(sig.elements.contains(&("B".into(), "b1".into(), "Button".into(), "".into())));
    }

    #[test]
    fn union_prefers_dynamic_screenshot() {
        let s = model_with(&["A"], &[("A", "a1", None)]);
        let d = model_with(&["A"], &[("A", "a1", Some("shots/a1.png"))]);
        let u = GuiModel::union(&s, &d);
        let a1 = u
            .find_element(u.screen_id("A").unwrap(), "a1", "Button")
            .unwrap();
        assert_eq!(u.element(a1).screenshot.as_deref(), Some("shots/a1.png"));
        assert_eq!(u.elements().len(), 2);
    }

    #[test]
    fn union_adds_dummy_self_edge() {
        let s = model_with(&["A"], &[("A", "a1", None)]);
        let u = GuiModel::union(&s, &s);
        let a = u.screen_id("A").unwrap();
        let a1 = u.find_element(a, "a1", "Button").unwrap();
        let out: Vec<_> = u.outgoing(a1).collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].a_type, ActionKind::Dummy);
        assert_eq!(out[0].t_type, Provenance::Dummy);
        assert_eq!(out[0].target, a);
        for e in u.element_ids() {
            assert!(u.outgoing(e).count() >= 1);
        }
    }

    #[test]
    fn distance_on_two_screen_fixture() {
        let gm = GuiModel::build_from_spec(&two_screen_spec()).unwrap();
        assert_eq!(
            gm.screen_distance("AccountsActivity", "TransactionsActivity").unwrap(),
            1
        );
        assert_eq!(gm.screen_distance("AccountsActivity", "AccountsActivity").unwrap(), 0);
        // directed: there is no way back
        assert_eq!(gm.screen_distance("TransactionsActivity", "AccountsActivity").unwrap(), 0);
        assert_eq!(gm.shortest_path_len(ScreenId(1), ScreenId(0)), None);
        assert!(matches!(
            gm.screen_distance("Nope", "AccountsActivity"),
            Err(GuiModelError::UnknownScreen(_))
        ));
    }

    fn leaf(id: &str) -> WidgetNode {
        WidgetNode {
            id: id.into(),
            etype: "Button".into(),
            text: String::new(),
            container: false,
            children: vec![],
        }
    }

    #[test]
    fn screens_equal_prunes_container_children() {
        let list = |rows: usize| WidgetNode {
            id: "list".into(),
            etype: "ListView".into(),
            text: String::new(),
            container: true,
            children: (0..rows).map(|i| leaf(&format!("row{i}"))).collect(),
        };
        let a = ScreenSnapshot {
            window: "Main".into(),
            nodes: vec![leaf("ok"), list(1)],
        };
        assert!(screens_equal(&a, &a.clone()));
        let b = ScreenSnapshot {
            window: "Main".into(),
            nodes: vec![leaf("ok"), list(4)],
        };
        assert!(screens_equal(&a, &b));
        let c = ScreenSnapshot {
            window: "Main".into(),
            nodes: vec![leaf("cancel"), list(1)],
        };
        assert!(!screens_equal(&a, &c));
    }

    #[test]
    fn json_round_trip_preserves_signature() {
        let gm = GuiModel::build_from_spec(&two_screen_spec()).unwrap();
        let back = GuiModel::from_json(&gm.to_json()).unwrap();
        assert_eq!(back.signature(), gm.signature());
        assert_eq!(back.initial_screen(), gm.initial_screen());
    }
}
