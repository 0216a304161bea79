//! Maps abstract GUI actions onto concrete elements of a GUI model and turns
//! S2R text into S2R entities.
//!
//! Element relevance:
//!
//! ```text
//! R(v) = α·max(S(e_desc, e_text), S(e_desc, id words)) + (1−α)/(1 + D(lrs, v))   if max > β
//!      = 0                                                                       otherwise
//! ```

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::gui_model::{ActionKind, ElementId, GuiModel};
use crate::nlp::{self, AbstractGuiAction, NlpConfig};
use crate::similarity::{split_identifier, EmbeddingStore};
use crate::traces::TraceTuple;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingParams {
    pub alpha: f64,
    pub beta: f64,
    /// Treat unreachable screens as farther than any reachable one instead
    /// of at distance 0.
    #[serde(default)]
    pub unreachable_as_max: bool,
}

impl Default for RankingParams {
    fn default() -> Self {
        RankingParams {
            alpha: 0.5,
            beta: 0.5,
            unreachable_as_max: false,
        }
    }
}

impl RankingParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(format!("beta {} outside [0, 1)", self.beta));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuiElementRef {
    pub e_screen: String,
    pub e_type: String,
    pub e_id: String,
    pub e_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuiAction {
    pub a_type: ActionKind,
    pub element: GuiElementRef,
    #[serde(default)]
    pub params: Vec<String>,
}

impl GuiAction {
    pub fn trace_tuple(&self) -> TraceTuple {
        TraceTuple::new(
            &self.element.e_screen,
            self.a_type,
            &self.element.e_type,
            &self.element.e_id,
        )
    }

    /// GUI-action token `screen.A_TYPE.etype.id`.
    pub fn gat_token(&self) -> String {
        self.trace_tuple().to_gat_token()
    }

    pub fn to_sim_action(&self) -> crate::app_sim::SimAction {
        crate::app_sim::SimAction {
            screen: self.element.e_screen.clone(),
            a_type: self.a_type,
            element: self.element.e_id.clone(),
            param: (self.a_type == ActionKind::Type)
                .then(|| self.params.first().cloned())
                .flatten(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct S2REntity {
    pub s2r_text: String,
    #[serde(default)]
    pub a_action: Option<AbstractGuiAction>,
    #[serde(default)]
    pub action: Option<GuiAction>,
    /// Screen the action is performed on.
    #[serde(default)]
    pub b_screen: Option<String>,
    /// Screen shown after the action; `None` is the wildcard.
    #[serde(default)]
    pub a_screen: Option<String>,
}

impl S2REntity {
    pub fn validated(&self) -> bool {
        self.action.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedElement {
    pub element: ElementId,
    pub score: f64,
    pub similarity: f64,
    pub distance: usize,
}

pub struct Resolver<'a> {
    pub gm: &'a GuiModel,
    pub store: &'a EmbeddingStore,
    pub params: RankingParams,
    pub nlp: &'a NlpConfig,
}

/// Removes one pair of surrounding quotes.
pub fn strip_quotes(s: &str) -> String {
    let t = s.trim();
    let open = ['"', '\u{201c}', '\u{201d}'];
    let t = t.strip_prefix(open).unwrap_or(t);
    let t = t.strip_suffix(open).unwrap_or(t);
    t.to_string()
}

/// Relevance of an element given its text and id similarities and its
/// distance from the last reached screen.
pub fn relevance(s_text: f64, s_id: f64, distance: usize, p: &RankingParams) -> f64 {
    let sim = s_text.max(s_id);
    if sim > p.beta {
        p.alpha * sim + (1.0 - p.alpha) / (1.0 + distance as f64)
    } else {
        0.0
    }
}

fn accepts(a_type: ActionKind, edge: ActionKind) -> bool {
    edge == a_type || (edge == ActionKind::Dummy && a_type != ActionKind::Rotate)
}

impl<'a> Resolver<'a> {
    pub fn new(gm: &'a GuiModel, store: &'a EmbeddingStore, params: RankingParams) -> Self {
        Resolver {
            gm,
            store,
            params,
            nlp: NlpConfig::builtin(),
        }
    }

    fn distance(&self, lrs: &str, to: &str, max_finite: usize) -> usize {
        let gm = self.gm;
        match (gm.screen_id(lrs), gm.screen_id(to)) {
            (Some(f), Some(t)) => match gm.shortest_path_len(f, t) {
                Some(d) => d,
                None if self.params.unreachable_as_max => max_finite + 1,
                None => 0,
            },
            _ => 0,
        }
    }

    fn candidates(&self, rs: Option<&str>, a_type: ActionKind) -> Vec<ElementId> {
        let gm = self.gm;
        let ids: Vec<ElementId> = match rs.and_then(|s| gm.screen_id(s)) {
            Some(s) => gm.elements_of(s).collect(),
            None if rs.is_none() => gm.element_ids().collect(),
            None => Vec::new(),
        };
        ids.into_iter()
            .filter(|&e| !gm.element(e).is_rotation())
            .filter(|&e| gm.outgoing(e).any(|t| accepts(a_type, t.a_type)))
            .collect()
    }

    /// Candidates on `rs` (every element when `rs` is the wildcard) that
    /// accept the action, in descending relevance.
    pub fn rank_elements(
        &self,
        lrs: &str,
        rs: Option<&str>,
        aga: &AbstractGuiAction,
    ) -> Vec<RankedElement> {
        let gm = self.gm;
        let cands = self.candidates(rs, aga.a_type);
        let max_finite = if self.params.unreachable_as_max {
            gm.screen_ids()
                .filter_map(|s| gm.screen_id(lrs).and_then(|f| gm.shortest_path_len(f, s)))
                .max()
                .unwrap_or(0)
        } else {
            0
        };
        let desc = aga.e_desc.as_deref().unwrap_or("");
        let mut out: Vec<RankedElement> = cands
            .into_iter()
            .map(|e| {
                let el = gm.element(e);
                let s_text = if el.text.is_empty() || desc.is_empty() {
                    0.0
                } else {
                    self.store.similarity(desc, &el.text).score
                };
                let s_id = if desc.is_empty() {
                    0.0
                } else {
                    self.store
                        .similarity(desc, &split_identifier(&el.id).join(" "))
                        .score
                };
                let sim = s_text.max(s_id);
                let d = self.distance(lrs, gm.screen_name(el.screen), max_finite);
                let score = relevance(s_text, s_id, d, &self.params);
                RankedElement {
                    element: e,
                    score,
                    similarity: sim,
                    distance: d,
                }
            })
            .collect();
        out.sort_by(|a, b| self.order(a, b, rs));
        out
    }

    fn order(&self, a: &RankedElement, b: &RankedElement, rs: Option<&str>) -> Ordering {
        let gm = self.gm;
        let on_rs = |r: &RankedElement| rs.is_some_and(|s| gm.screen_name(gm.element(r.element).screen) == s);
        let ea = gm.element(a.element);
        let eb = gm.element(b.element);
        b.score
            .total_cmp(&a.score)
            .then(on_rs(b).cmp(&on_rs(a)))
            .then(ea.id.cmp(&eb.id))
            .then(gm.screen_name(ea.screen).cmp(gm.screen_name(eb.screen)))
            .then(ea.etype.cmp(&eb.etype))
            .then(ea.text.cmp(&eb.text))
    }

    /// Builds the concrete action on element `e`.
    pub fn action_on(&self, e: ElementId, a_type: ActionKind, aga: &AbstractGuiAction) -> (GuiAction, String) {
        let gm = self.gm;
        let el = gm.element(e);
        let own = gm.screen_name(el.screen).to_string();
        let target = gm
            .outgoing(e)
            .filter(|t| accepts(a_type, t.a_type))
            .min_by_key(|t| t.a_type == ActionKind::Dummy)
            .map(|t| {
                if t.a_type == ActionKind::Dummy {
                    own.clone()
                } else {
                    gm.screen_name(t.target).to_string()
                }
            })
            .unwrap_or_else(|| own.clone());
        let params = match a_type {
            ActionKind::Type => aga.p_desc.iter().map(|p| strip_quotes(p)).collect(),
            ActionKind::Scroll => vec![aga
                .p_desc
                .as_deref()
                .map(str::to_uppercase)
                .filter(|d| matches!(d.as_str(), "UP" | "DOWN" | "LEFT" | "RIGHT"))
                .unwrap_or_else(|| "DOWN".to_string())],
            _ => Vec::new(),
        };
        let action = GuiAction {
            a_type,
            element: GuiElementRef {
                e_screen: own,
                e_type: el.etype.clone(),
                e_id: el.id.clone(),
                e_text: el.text.clone(),
            },
            params,
        };
        (action, target)
    }

    /// Maps one AGA to an entity. ROTATE binds directly to the rotation
    /// element of the reached screen (the last-reached one under the
    /// wildcard); a SCROLL without a target binds to the only scrollable
    /// element of the reached screen when there is exactly one.
    pub fn resolve_aga(&self, lrs: &str, rs: Option<&str>, text: &str, aga: &AbstractGuiAction) -> S2REntity {
        let gm = self.gm;
        let chosen = match aga.a_type {
            ActionKind::Rotate => gm
                .screen_id(rs.unwrap_or(lrs))
                .and_then(|s| gm.rotation_element(s)),
            ActionKind::Scroll if aga.e_desc.is_none() => {
                let c: Vec<ElementId> = self
                    .candidates(Some(rs.unwrap_or(lrs)), ActionKind::Scroll)
                    .into_iter()
                    .filter(|&e| gm.outgoing(e).any(|t| t.a_type == ActionKind::Scroll))
                    .collect();
                (c.len() == 1).then(|| c[0])
            }
            _ => self
                .rank_elements(lrs, rs, aga)
                .first()
                .filter(|r| r.score > 0.0)
                .map(|r| r.element),
        };
        match chosen {
            Some(e) => {
                let (action, a_screen) = self.action_on(e, aga.a_type, aga);
                S2REntity {
                    s2r_text: text.to_string(),
                    a_action: Some(aga.clone()),
                    b_screen: Some(action.element.e_screen.clone()),
                    action: Some(action),
                    a_screen: Some(a_screen),
                }
            }
            None => S2REntity {
                s2r_text: text.to_string(),
                a_action: Some(aga.clone()),
                action: None,
                b_screen: rs.map(String::from),
                a_screen: None,
            },
        }
    }

    /// Clauses of the terminated sentences of `text`, each with its AGA.
    /// Element names replaced by placeholders during preprocessing are
    /// restored in both the clause text and the AGA.
    pub fn extract_steps(&self, text: &str) -> Vec<(String, Option<AbstractGuiAction>)> {
        let names: Vec<&str> = self.gm.elements().iter().map(|e| e.text.as_str()).collect();
        let mut out = Vec::new();
        for span in nlp::split_sentences(text).into_iter().filter(|s| s.terminated) {
            let pre = nlp::preprocess_with(span.text(text), &names, self.nlp);
            let expand = |s: &str| nlp::expand_placeholders(s, &pre.placeholders);
            for clause in nlp::split_clauses(&pre.text) {
                let aga = nlp::extract_aga(&clause).map(|a| AbstractGuiAction {
                    a_type: a.a_type,
                    e_desc: a.e_desc.as_deref().map(expand),
                    p_desc: a.p_desc.as_deref().map(expand),
                });
                out.push((expand(&clause), aga));
            }
        }
        out
    }

    /// Maps the S2R description to entities, reusing the longest prefix of
    /// `prev` whose clauses and AGAs are unchanged.
    pub fn compute_s2res(&self, text: &str, prev: &[S2REntity]) -> Vec<S2REntity> {
        let steps = self.extract_steps(text);
        let reuse = steps
            .iter()
            .zip(prev)
            .take_while(|((t, a), e)| *t == e.s2r_text && *a == e.a_action)
            .count();
        let mut out: Vec<S2REntity> = prev[..reuse].to_vec();
        let initial = self.gm.screen_name(self.gm.initial_screen()).to_string();
        let mut rs = match out.last() {
            Some(e) => e.a_screen.clone(),
            None => Some(initial.clone()),
        };
        let mut lrs = out
            .iter()
            .rev()
            .find_map(|e| e.action.as_ref().and(e.a_screen.clone()))
            .unwrap_or(initial);
        for (t, aga) in &steps[reuse..] {
            let ent = match aga {
                Some(a) => self.resolve_aga(&lrs, rs.as_deref(), t, a),
                None => S2REntity {
                    s2r_text: t.clone(),
                    a_action: None,
                    action: None,
                    b_screen: rs.clone(),
                    a_screen: None,
                },
            };
            rs = ent.a_screen.clone();
            if ent.action.is_some() {
                lrs = ent.a_screen.clone().expect("resolved entities have a screen");
            }
            out.push(ent);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gui_model::Provenance;

    const VEC: &str = "save 1 0 0\nstore 1 0 0\nbutton 0 1 0\nlist 0 0 1\nrow 0 0.2 1\n";

    fn store() -> EmbeddingStore {
        EmbeddingStore::load_vectors(VEC).unwrap()
    }

    /// A → B via "go"; both screens have a "save" button.
    fn model() -> GuiModel {
        let mut gm = GuiModel::new("t", "A", Provenance::Static);
        let a = gm.initial_screen();
        let b = gm.add_screen("B", None, Provenance::Static);
        let go = gm.add_element(a, "go", "Button", "Go", None);
        gm.add_transition(go, b, ActionKind::Click, Provenance::Static);
        gm.add_element(a, "save_a", "Button", "Save", None);
        gm.add_element(b, "save_b", "Button", "Save", None);
        gm.add_element(b, "items", "ListView", "", None);
        gm.finalize();
        gm
    }

    fn click(desc: &str) -> AbstractGuiAction {
        AbstractGuiAction::new(ActionKind::Click, Some(desc), None)
    }

    #[test]
    fn relevance_worked_example() {
        let p = RankingParams::default();
        assert!((relevance(0.8, 0.6, 1, &p) - 0.65).abs() < 1e-12);
        assert_eq!(relevance(0.5, 0.4, 0, &p), 0.0);
        assert!((relevance(0.3, 0.9, 0, &p) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn relevance_formula_value() {
        // S(text) = 1 via "save"/"store", D(A, B) = 1
        let gm = model();
        let s = store();
        let r = Resolver::new(&gm, &s, RankingParams::default());
        let ranked = r.rank_elements("A", None, &click("store"));
        let top = ranked.iter().find(|x| gm.element(x.element).id == "save_b").unwrap();
        assert_eq!(top.distance, 1);
        assert!((top.score - (0.5 * 1.0 + 0.5 * 0.5)).abs() < 1e-12);
        assert_eq!(gm.element(ranked[0].element).id, "save_a");
    }

    #[test]
    fn below_threshold_scores_zero() {
        let gm = model();
        let s = store();
        let r = Resolver::new(&gm, &s, RankingParams::default());
        let ranked = r.rank_elements("A", Some("A"), &click("list"));
        assert!(ranked.iter().all(|x| x.score == 0.0));
        let e = r.resolve_aga("A", Some("A"), "Click the list.", &click("list"));
        assert!(e.action.is_none());
        assert_eq!(e.a_screen, None);
    }

    #[test]
    fn ties_prefer_reached_screen_then_id() {
        let mut gm = GuiModel::new("t", "A", Provenance::Static);
        let a = gm.initial_screen();
        let b = gm.add_screen("B", None, Provenance::Static);
        gm.add_element(a, "z_save", "Button", "Save", None);
        gm.add_element(a, "a_save", "Button", "Save", None);
        gm.add_element(b, "0_save", "Button", "Save", None);
        gm.finalize();
        let s = store();
        let r = Resolver::new(&gm, &s, RankingParams::default());
        let ids: Vec<&str> = r
            .rank_elements("A", Some("A"), &click("save"))
            .iter()
            .map(|x| gm.element(x.element).id.as_str())
            .collect();
        assert_eq!(ids, ["a_save", "z_save"]);
        // under the wildcard B's element is unreachable (D = 0) and ties on score
        let ids: Vec<&str> = r
            .rank_elements("A", None, &click("save"))
            .iter()
            .map(|x| gm.element(x.element).id.as_str())
            .collect();
        assert_eq!(ids, ["0_save", "a_save", "z_save"]);
    }

    #[test]
    fn resolves_transition_target_and_params() {
        let gm = model();
        let s = EmbeddingStore::load_vectors("go 1 0\nsave 0 1\n").unwrap();
        let r = Resolver::new(&gm, &s, RankingParams::default());
        let e = r.resolve_aga("A", Some("A"), "Click Go.", &click("Go"));
        assert_eq!(e.a_screen.as_deref(), Some("B"));
        assert_eq!(e.action.as_ref().unwrap().element.e_id, "go");
        let t = AbstractGuiAction::new(ActionKind::Type, Some("the save field"), Some("\"Rent\""));
        let e = r.resolve_aga("B", Some("B"), "Type.", &t);
        let act = e.action.unwrap();
        assert_eq!(act.params, ["Rent"]);
        // dummy edge keeps the screen
        assert_eq!(e.a_screen.as_deref(), Some("B"));
        let rot = r.resolve_aga("A", Some("B"), "Rotate.", &AbstractGuiAction::new(ActionKind::Rotate, None, None));
        assert_eq!(rot.action.unwrap().element.e_id, crate::gui_model::ROTATE_ID);
        assert_eq!(rot.a_screen.as_deref(), Some("B"));
        let sc = r.resolve_aga("B", Some("B"), "Scroll.", &AbstractGuiAction::new(ActionKind::Scroll, None, Some("UP")));
        assert!(sc.action.is_none(), "no element declares a real SCROLL edge");
    }

    #[test]
    fn prefix_reuse_and_wildcard_flow() {
        let gm = model();
        let s = EmbeddingStore::load_vectors("go 1 0\nsave 0 1\n").unwrap();
        let r = Resolver::new(&gm, &s, RankingParams::default());
        let first = r.compute_s2res("Click Go. Click Save. Click the unknown thing.", &[]);
        assert_eq!(first.len(), 3);
        assert_eq!(first[1].action.as_ref().unwrap().element.e_id, "save_b");
        assert!(first[2].action.is_none());
        let more = r.compute_s2res("Click Go. Click Save. Click the unknown thing. Click Save.", &first);
        assert_eq!(&more[..3], &first[..]);
        // after a wildcard every element is a candidate; A is unreachable
        // from lrs = B so it ties with B at distance 0 and the id decides
        assert_eq!(more[3].action.as_ref().unwrap().element.e_id, "save_a");
        let far = Resolver::new(&gm, &s, RankingParams { unreachable_as_max: true, ..Default::default() });
        let more_far = far.compute_s2res("Click Go. Click Save. Click the unknown thing. Click Save.", &[]);
        assert_eq!(more_far[3].action.as_ref().unwrap().element.e_id, "save_b");
        assert_eq!(more, r.compute_s2res("Click Go. Click Save. Click the unknown thing. Click Save.", &[]));
        // unterminated text is not mapped
        assert_eq!(r.compute_s2res("Click Go", &[]).len(), 0);
    }

    proptest::proptest! {
        #[test]
        fn relevance_bounded_and_distance_monotone(
            st in 0.0f64..=1.0, si in 0.0f64..=1.0, d in 0usize..20,
            alpha in 0.0f64..=1.0, beta in 0.0f64..1.0,
        ) {
            let p = RankingParams { alpha, beta, unreachable_as_max: false };
            let r = relevance(st, si, d, &p);
            proptest::prop_assert!((0.0..=1.0).contains(&r));
            proptest::prop_assert!(relevance(st, si, d + 1, &p) <= r);
            proptest::prop_assert_eq!(r > 0.0, st.max(si) > beta);
        }
    }
}
