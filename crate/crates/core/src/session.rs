//! Interactive reporting sessions: per-edit validation, next-step and
//! completion suggestions, and report submission.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundle::{write_atomic, AppBundle};
use crate::gui_model::{ActionKind, ElementId, GuiModel};
use crate::nlp::{self, NlpConfig, PartialKind};
use crate::predictor::ModelKind;
use crate::resolver::{GuiAction, RankingParams, Resolver, S2REntity};
use crate::similarity::{split_identifier, EmbeddingStore};
use crate::traces::{split_action_token, split_element_token, TraceTuple};

/// Inline text offered for a missing TYPE parameter.
pub const PARAM_PLACEHOLDER: &str = "\"text\"";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuggestionKind {
    GuiAction,
    GuiElement,
    Param,
    Structure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub kind: SuggestionKind,
    pub text: String,
    #[serde(default)]
    pub token: Option<String>,
    #[serde(default)]
    pub screenshot: Option<String>,
    /// 1-based position in the list.
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EditOp {
    Insert,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub op: EditOp,
    #[serde(default)]
    pub new_text: String,
}

impl Edit {
    pub fn insert(s: &str) -> Edit {
        Edit {
            op: EditOp::Insert,
            new_text: s.to_string(),
        }
    }

    pub fn delete() -> Edit {
        Edit {
            op: EditOp::Delete,
            new_text: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityView {
    pub text: String,
    pub validated: bool,
    #[serde(default)]
    pub action: Option<GuiAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateResult {
    pub entities: Vec<EntityView>,
    /// `None` when the steps could not be followed to a known screen.
    pub current_screen: Option<String>,
    pub suggestions: Vec<Suggestion>,
    pub revision: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SessionError {
    #[error("session is closed")]
    Closed,
    #[error("stale text: {0}")]
    Stale(String),
    #[error("cannot render token `{0}`")]
    BadToken(String),
    #[error("persisting report failed: {0}")]
    Persistence(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugReport {
    pub id: String,
    pub app_id: String,
    pub title: String,
    pub description: String,
    pub expected: String,
    pub observed: String,
    pub s2r_text: String,
    pub entities: Vec<S2REntity>,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFields {
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub expected: String,
    #[serde(default)]
    pub observed: String,
}

/// Word naming an element type in rendered steps.
pub fn kind_word(etype: &str) -> &'static str {
    match etype {
        "Button" | "ImageButton" => "button",
        "EditText" => "text box",
        "ToggleButton" | "Switch" => "toggle",
        "CheckBox" => "checkbox",
        "ListView" | "RecyclerView" => "list",
        _ => "element",
    }
}

/// Visible text of an element, or its identifier words when it has none.
pub fn element_label(text: &str, id: &str) -> String {
    if text.trim().is_empty() {
        split_identifier(id).join(" ")
    } else {
        text.to_string()
    }
}

fn element_of(gm: &GuiModel, screen: &str, etype: &str, id: &str) -> Option<ElementId> {
    gm.find_element(gm.screen_id(screen)?, id, etype)
}

/// Renders a GAT token as a full step or an element token as a target
/// phrase, filling the template from the model.
pub fn render_suggestion(token: &str, gm: &GuiModel) -> Result<Suggestion, SessionError> {
    let bad = || SessionError::BadToken(token.to_string());
    if let Ok(t) = TraceTuple::from_gat_token(token) {
        let e = element_of(gm, &t.s_name, &t.e_type, &t.e_id).ok_or_else(bad)?;
        let el = gm.element(e);
        let target = format!("the \"{}\" {}", element_label(&el.text, &el.id), kind_word(&el.etype));
        let text = match t.a_type {
            ActionKind::Click => format!("Click {target}."),
            ActionKind::LongClick => format!("Long click {target}."),
            ActionKind::Type => format!("Type {PARAM_PLACEHOLDER} in {target}."),
            ActionKind::Scroll => format!("Scroll down on {target}."),
            ActionKind::Rotate => "Rotate the screen.".to_string(),
            ActionKind::Dummy => return Err(bad()),
        };
        return Ok(Suggestion {
            kind: SuggestionKind::GuiAction,
            text,
            token: Some(token.to_string()),
            screenshot: el.screenshot.clone(),
            rank: 0,
        });
    }
    let (s, etype, id) = split_element_token(token).ok_or_else(bad)?;
    let e = element_of(gm, s, etype, id).ok_or_else(bad)?;
    let el = gm.element(e);
    if el.is_rotation() {
        return Err(bad());
    }
    Ok(Suggestion {
        kind: SuggestionKind::GuiElement,
        text: format!("\"{}\" {}", element_label(&el.text, &el.id), kind_word(&el.etype)),
        token: Some(token.to_string()),
        screenshot: el.screenshot.clone(),
        rank: 0,
    })
}

fn element_token(gm: &GuiModel, e: ElementId) -> String {
    let el = gm.element(e);
    format!("{}.{}.{}", gm.screen_name(el.screen), el.etype, el.id)
}

fn numbered(mut v: Vec<Suggestion>) -> Vec<Suggestion> {
    for (i, s) in v.iter_mut().enumerate() {
        s.rank = i + 1;
    }
    v
}

pub struct ReportingSession {
    session_id: String,
    app: Arc<AppBundle>,
    store: Arc<EmbeddingStore>,
    params: RankingParams,
    nlp: &'static NlpConfig,
    full_text: String,
    entities: Vec<S2REntity>,
    current_screen: Option<String>,
    suggestion_cache: Vec<Suggestion>,
    revision: u64,
    closed: bool,
}

impl ReportingSession {
    pub fn open(app: Arc<AppBundle>, store: Arc<EmbeddingStore>, params: RankingParams) -> Self {
        Self::with_id(uuid::Uuid::new_v4().simple().to_string(), app, store, params)
    }

    pub fn with_id(session_id: String, app: Arc<AppBundle>, store: Arc<EmbeddingStore>, params: RankingParams) -> Self {
        let initial = app.gm().screen_name(app.gm().initial_screen()).to_string();
        ReportingSession {
            session_id,
            app,
            store,
            params,
            nlp: NlpConfig::builtin(),
            full_text: String::new(),
            entities: Vec::new(),
            current_screen: Some(initial),
            suggestion_cache: Vec::new(),
            revision: 0,
            closed: false,
        }
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn app(&self) -> &AppBundle {
        &self.app
    }

    pub fn entities(&self) -> &[S2REntity] {
        &self.entities
    }

    pub fn current_screen(&self) -> Option<&str> {
        self.current_screen.as_deref()
    }

    pub fn suggestions(&self) -> &[Suggestion] {
        &self.suggestion_cache
    }

    pub fn full_text(&self) -> &str {
        &self.full_text
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn resolver(&self) -> Resolver<'_> {
        Resolver::new(self.app.gm(), &self.store, self.params)
    }

    fn initial_screen(&self) -> String {
        let gm = self.app.gm();
        gm.screen_name(gm.initial_screen()).to_string()
    }

    /// Screen reached by the last validated step.
    fn last_reached(&self) -> String {
        self.entities
            .iter()
            .rev()
            .find_map(|e| e.action.as_ref().and(e.a_screen.clone()))
            .unwrap_or_else(|| self.initial_screen())
    }

    /// Handles one edit. `full_text` is the whole description after the
    /// edit; `revision`, when given, must equal the number of events this
    /// session has accepted so far.
    pub fn on_text_change(&mut self, full_text: &str, edit: &Edit, revision: Option<u64>) -> Result<UpdateResult, SessionError> {
        if self.closed {
            return Err(SessionError::Closed);
        }
        if let Some(r) = revision {
            if r != self.revision {
                return Err(SessionError::Stale(format!("revision {r}, session is at {}", self.revision)));
            }
        }
        if edit.op == EditOp::Insert && !full_text.contains(&edit.new_text) {
            return Err(SessionError::Stale("inserted text is not part of the description".into()));
        }
        self.full_text = full_text.to_string();
        self.entities = self.resolver().compute_s2res(full_text, &self.entities);
        self.current_screen = match self.entities.last() {
            Some(e) => e.a_screen.clone(),
            None => Some(self.initial_screen()),
        };
        self.suggestion_cache = match edit.op {
            EditOp::Delete => Vec::new(),
            EditOp::Insert => {
                let t = edit.new_text.as_str();
                if t.trim_end().ends_with(nlp::TERMINATORS) {
                    self.action_suggestions()
                } else if t.ends_with(char::is_whitespace) {
                    self.partial_suggestions()
                } else {
                    self.text_match_suggestions()
                }
            }
        };
        self.revision += 1;
        Ok(self.snapshot())
    }

    pub fn snapshot(&self) -> UpdateResult {
        UpdateResult {
            entities: self
                .entities
                .iter()
                .map(|e| EntityView {
                    text: e.s2r_text.clone(),
                    validated: e.validated(),
                    action: e.action.clone(),
                })
                .collect(),
            current_screen: self.current_screen.clone(),
            suggestions: self.suggestion_cache.clone(),
            revision: self.revision,
        }
    }

    /// Actions of the last `k` entities, or `None` when one of them has
    /// no action.
    fn recent_actions(&self, k: usize) -> Option<Vec<&GuiAction>> {
        let start = self.entities.len().saturating_sub(k);
        self.entities[start..].iter().map(|e| e.action.as_ref()).collect()
    }

    /// Next-step suggestions from the action model.
    pub fn action_suggestions(&self) -> Vec<Suggestion> {
        let gapm = &self.app.models.gapm;
        let Some(recent) = self.recent_actions(gapm.order() - 1) else {
            return Vec::new();
        };
        let ctx: Vec<String> = recent.iter().map(|a| a.gat_token()).collect();
        let sn = self.app.suggestion_len(ModelKind::Gapm);
        let gm = self.app.gm();
        numbered(
            gapm.rank(&ctx)
                .into_iter()
                .filter_map(|t| render_suggestion(t, gm).ok())
                .filter(|s| s.kind == SuggestionKind::GuiAction)
                .take(sn)
                .collect(),
        )
    }

    /// Unterminated text after the last complete sentence.
    fn partial_text(&self) -> &str {
        match nlp::split_sentences(&self.full_text).last() {
            Some(s) if !s.terminated => s.text(&self.full_text),
            _ => "",
        }
    }

    fn partial_suggestions(&self) -> Vec<Suggestion> {
        let names: Vec<&str> = self.app.gm().elements().iter().map(|e| e.text.as_str()).collect();
        let pre = nlp::preprocess_with(self.partial_text(), &names, self.nlp);
        let info = nlp::classify_partial_info(&pre.text);
        let inline = |kind, text: String| {
            numbered(vec![Suggestion {
                kind,
                text,
                token: None,
                screenshot: None,
                rank: 0,
            }])
        };
        match (info.kind, info.a_type) {
            (PartialKind::Target, Some(a)) => self.target_suggestions(a),
            (PartialKind::Param, _) => inline(SuggestionKind::Param, PARAM_PLACEHOLDER.to_string()),
            (PartialKind::Particle, _) => inline(SuggestionKind::Structure, info.particle.unwrap_or_default()),
            _ => Vec::new(),
        }
    }

    /// Likely targets of an action from the element model, or elements
    /// accepting the action ordered by distance when the model cannot be
    /// queried.
    pub fn target_suggestions(&self, a_type: ActionKind) -> Vec<Suggestion> {
        let gepm = &self.app.models.gepm;
        let sn = self.app.suggestion_len(ModelKind::Gepm);
        let gm = self.app.gm();
        let needed = (gepm.order().saturating_sub(2)).div_ceil(2);
        if let (Some(screen), Some(recent)) = (self.current_screen.as_deref(), self.recent_actions(needed)) {
            let mut ctx: Vec<String> = recent
                .iter()
                .flat_map(|a| {
                    let t = a.trace_tuple();
                    [t.action_token(), t.element_token()]
                })
                .collect();
            ctx.push(format!("{screen}.{}", a_type.as_str()));
            let out: Vec<Suggestion> = gepm
                .rank(&ctx)
                .into_iter()
                .filter(|t| split_action_token(t).is_none())
                .filter_map(|t| render_suggestion(t, gm).ok())
                .take(sn)
                .collect();
            if !out.is_empty() {
                return numbered(out);
            }
        }
        let r = self.resolver();
        let lrs = self.last_reached();
        let aga = nlp::AbstractGuiAction::new(a_type, None, None);
        let mut cands: Vec<(usize, String, ElementId)> = r
            .rank_elements(&lrs, self.current_screen.as_deref(), &aga)
            .into_iter()
            .map(|x| {
                let d = self.distance_from(&lrs, x.element);
                (d, element_token(gm, x.element), x.element)
            })
            .collect();
        cands.sort();
        numbered(
            cands
                .into_iter()
                .filter_map(|(_, tok, _)| render_suggestion(&tok, gm).ok())
                .take(sn)
                .collect(),
        )
    }

    /// Shortest-path length from `from`; unreachable elements sort last.
    fn distance_from(&self, from: &str, e: ElementId) -> usize {
        let gm = self.app.gm();
        gm.screen_id(from)
            .and_then(|f| gm.shortest_path_len(f, gm.element(e).screen))
            .unwrap_or(usize::MAX)
    }

    /// Elements whose label starts with the fragment being typed after a
    /// determiner or an opening quote.
    fn text_match_suggestions(&self) -> Vec<Suggestion> {
        let partial = self.partial_text();
        let quotes = partial.chars().filter(|&c| matches!(c, '"' | '\u{201c}' | '\u{201d}')).count();
        let fragment = if quotes % 2 == 1 {
            let i = partial.rfind(['"', '\u{201c}', '\u{201d}']).expect("odd quote count");
            partial[i..].chars().skip(1).collect::<String>()
        } else {
            let words: Vec<&str> = partial.split_whitespace().collect();
            match words.as_slice() {
                [.., det, last] if self.nlp.is_determiner(det) => last.to_string(),
                _ => String::new(),
            }
        };
        let frag = fragment.trim_start().to_lowercase();
        if frag.is_empty() {
            return Vec::new();
        }
        let gm = self.app.gm();
        let lrs = self.last_reached();
        let screen = self.current_screen.as_deref().and_then(|s| gm.screen_id(s));
        let mut hits: Vec<(usize, String, String)> = gm
            .element_ids()
            .filter(|&e| !gm.element(e).is_rotation())
            .filter(|&e| screen.is_none_or(|s| gm.element(e).screen == s))
            .filter_map(|e| {
                let el = gm.element(e);
                let label = element_label(&el.text, &el.id);
                let l = label.to_lowercase();
                let hit = l.starts_with(&frag) || l.split_whitespace().any(|w| w.starts_with(&frag));
                hit.then(|| (self.distance_from(&lrs, e), label, element_token(gm, e)))
            })
            .collect();
        hits.sort();
        hits.dedup_by(|a, b| a.2 == b.2);
        let sn = self.app.suggestion_len(ModelKind::Gepm);
        numbered(
            hits.into_iter()
                .take(sn)
                .map(|(_, label, tok)| Suggestion {
                    kind: SuggestionKind::GuiElement,
                    screenshot: gm.element(element_of_token(gm, &tok)).screenshot.clone(),
                    text: label,
                    token: Some(tok),
                    rank: 0,
                })
                .collect(),
        )
    }

    /// Freezes the current description into a report and closes the
    /// session. An unterminated last sentence is terminated first.
    pub fn submit(&mut self, fields: ReportFields, reports: &ReportStore) -> Result<BugReport, SessionError> {
        if self.closed {
            return Err(SessionError::Closed);
        }
        let mut text = self.full_text.trim_end().to_string();
        if nlp::split_sentences(&text).last().is_some_and(|s| !s.terminated) {
            text.push('.');
        }
        let entities = self.resolver().compute_s2res(&text, &[]);
        let report = BugReport {
            id: uuid::Uuid::new_v4().simple().to_string(),
            app_id: self.app.app_id().to_string(),
            title: fields.title,
            description: fields.description,
            expected: fields.expected,
            observed: fields.observed,
            s2r_text: text,
            entities,
            created_at: Utc::now(),
        };
        reports.save(&report)?;
        self.entities = report.entities.clone();
        self.closed = true;
        Ok(report)
    }
}

fn element_of_token(gm: &GuiModel, tok: &str) -> ElementId {
    let (s, t, i) = split_element_token(tok).expect("built from the model");
    element_of(gm, s, t, i).expect("built from the model")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub id: String,
    pub app_id: String,
    pub title: String,
    pub created_at: DateTime<Utc>,
    pub steps: usize,
    pub validated: usize,
}

impl ReportSummary {
    pub fn of(r: &BugReport) -> Self {
        ReportSummary {
            id: r.id.clone(),
            app_id: r.app_id.clone(),
            title: r.title.clone(),
            created_at: r.created_at,
            steps: r.entities.len(),
            validated: r.entities.iter().filter(|e| e.validated()).count(),
        }
    }
}

pub const INDEX_FILE: &str = "index.jsonl";

/// Reports directory: one `<id>.json` per report plus an append-only index.
#[derive(Debug, Clone)]
pub struct ReportStore {
    dir: PathBuf,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl ReportStore {
    pub fn open(dir: &Path) -> Result<Self, SessionError> {
        fs::create_dir_all(dir).map_err(|e| SessionError::Persistence(format!("{}: {e}", dir.display())))?;
        Ok(ReportStore { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn save(&self, report: &BugReport) -> Result<(), SessionError> {
        let fail = |e: &dyn std::fmt::Display| SessionError::Persistence(e.to_string());
        if !valid_id(&report.id) {
            return Err(SessionError::Persistence(format!("invalid report id `{}`", report.id)));
        }
        let body = serde_json::to_string_pretty(report).map_err(|e| fail(&e))?;
        write_atomic(&self.dir.join(format!("{}.json", report.id)), &body).map_err(|e| fail(&e))?;
        let line = serde_json::to_string(&ReportSummary::of(report)).map_err(|e| fail(&e))?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(INDEX_FILE))
            .map_err(|e| fail(&e))?;
        writeln!(f, "{line}").map_err(|e| fail(&e))
    }

    /// Summaries newest first, optionally restricted to one app.
    pub fn list(&self, app_id: Option<&str>) -> Result<Vec<ReportSummary>, SessionError> {
        let path = self.dir.join(INDEX_FILE);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(&path).map_err(|e| SessionError::Persistence(e.to_string()))?;
        let mut out: Vec<ReportSummary> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| SessionError::Persistence(format!("{INDEX_FILE}: {e}"))))
            .collect::<Result<_, _>>()?;
        out.retain(|s| app_id.is_none_or(|a| s.app_id == a));
        // later index lines are newer among equal timestamps
        out.reverse();
        out.sort_by_key(|s| std::cmp::Reverse(s.created_at));
        Ok(out)
    }

    pub fn get(&self, id: &str) -> Result<Option<BugReport>, SessionError> {
        if !valid_id(id) {
            return Ok(None);
        }
        let path = self.dir.join(format!("{id}.json"));
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| SessionError::Persistence(e.to_string()))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| SessionError::Persistence(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gui_model::Provenance;
    use crate::resolver::GuiElementRef;

    fn model() -> GuiModel {
        let mut gm = GuiModel::new("t", "AccountsActivity", Provenance::Static);
        let a = gm.initial_screen();
        let e = gm.add_element(a, "menu_save", "TextView", "Save", None);
        gm.add_transition(e, a, ActionKind::Click, Provenance::Static);
        gm.add_element(a, "menu_save_all", "TextView", "", Some("shots/save_all.png".into()));
        gm.add_element(a, "edit_name", "EditText", "Account name", None);
        gm.finalize();
        gm
    }

    #[test]
    fn renders_templates() {
        let gm = model();
        let s = render_suggestion("AccountsActivity.CLICK.TextView.menu_save", &gm).unwrap();
        assert_eq!(s.text, "Click the \"Save\" element.");
        assert_eq!(s.kind, SuggestionKind::GuiAction);
        assert_eq!(s.screenshot, None);
        let s = render_suggestion("AccountsActivity.CLICK.TextView.menu_save_all", &gm).unwrap();
        assert_eq!(s.text, "Click the \"menu save all\" element.");
        assert_eq!(s.screenshot.as_deref(), Some("shots/save_all.png"));
        let s = render_suggestion("AccountsActivity.ROTATE.Screen.__rotate__", &gm).unwrap();
        assert_eq!(s.text, "Rotate the screen.");
        let s = render_suggestion("AccountsActivity.TYPE.EditText.edit_name", &gm).unwrap();
        assert_eq!(s.text, "Type \"text\" in the \"Account name\" text box.");
        let s = render_suggestion("AccountsActivity.EditText.edit_name", &gm).unwrap();
        assert_eq!((s.kind, s.text.as_str()), (SuggestionKind::GuiElement, "\"Account name\" text box"));
        for bad in ["Nope.CLICK.TextView.menu_save", "AccountsActivity.DUMMY.TextView.menu_save", "garbage", "AccountsActivity.Screen.__rotate__"] {
            assert_eq!(render_suggestion(bad, &gm), Err(SessionError::BadToken(bad.into())), "{bad}");
        }
    }

    #[test]
    fn kind_words() {
        assert_eq!(kind_word("ImageButton"), "button");
        assert_eq!(kind_word("EditText"), "text box");
        assert_eq!(kind_word("Switch"), "toggle");
        assert_eq!(kind_word("FrameLayout"), "element");
    }

    fn report(id: &str, app: &str, secs: i64) -> BugReport {
        BugReport {
            id: id.into(),
            app_id: app.into(),
            title: format!("r {id}"),
            description: String::new(),
            expected: String::new(),
            observed: String::new(),
            s2r_text: "Click Save.".into(),
            entities: vec![S2REntity {
                s2r_text: "Click Save".into(),
                a_action: None,
                action: Some(GuiAction {
                    a_type: ActionKind::Click,
                    element: GuiElementRef {
                        e_screen: "A".into(),
                        e_type: "Button".into(),
                        e_id: "save".into(),
                        e_text: "Save".into(),
                    },
                    params: vec![],
                }),
                b_screen: Some("A".into()),
                a_screen: Some("A".into()),
            }],
            created_at: DateTime::from_timestamp(1_700_000_000 + secs, 0).unwrap(),
        }
    }

    #[test]
    fn report_store_round_trip_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let store = ReportStore::open(dir.path()).unwrap();
        assert!(store.list(None).unwrap().is_empty());
        store.save(&report("r1", "a", 0)).unwrap();
        store.save(&report("r2", "b", 5)).unwrap();
        store.save(&report("r3", "a", 5)).unwrap();
        let ids: Vec<String> = store.list(None).unwrap().into_iter().map(|s| s.id).collect();
        assert_eq!(ids, ["r3", "r2", "r1"]);
        let ids: Vec<String> = store.list(Some("a")).unwrap().into_iter().map(|s| s.id).collect();
        assert_eq!(ids, ["r3", "r1"]);
        assert_eq!(store.get("r2").unwrap(), Some(report("r2", "b", 5)));
        assert_eq!(store.get("missing").unwrap(), None);
        assert_eq!(store.get("../r1").unwrap(), None);
        let docs = std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "json"))
            .count();
        assert_eq!(docs, store.list(None).unwrap().len());
        assert!(matches!(store.save(&report("../x", "a", 0)), Err(SessionError::Persistence(_))));
    }
}
