//! Python bindings. Structured results are returned as plain dicts and
//! lists with the same field names as the HTTP API.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use s2r_core::bundle::{build_models, load_spec, load_traces, replay_entities, AppBundle, BuildOptions};
use s2r_core::ngram::{NgramModel as CoreNgram, DEFAULT_DISCOUNT};
use s2r_core::nlp;
use s2r_core::predictor::{self, ModelKind};
use s2r_core::resolver::RankingParams;
use s2r_core::session::{Edit, ReportFields, ReportStore, ReportingSession};
use s2r_core::similarity::EmbeddingStore;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_kind(kind: &str) -> PyResult<ModelKind> {
    serde_json::from_value(serde_json::Value::String(kind.to_uppercase()))
        .map_err(|_| PyValueError::new_err(format!("unknown model kind `{kind}`; expected GAPM or GEPM")))
}

fn ranking(alpha: f64, beta: f64, unreachable_as_max: bool) -> PyResult<RankingParams> {
    let p = RankingParams { alpha, beta, unreachable_as_max };
    p.validate().map_err(value_err)?;
    Ok(p)
}

/// Word vectors used for phrase similarity.
#[pyclass(module = "s2r_assist", frozen)]
struct Lexicon {
    store: Arc<EmbeddingStore>,
}

#[pymethods]
impl Lexicon {
    /// Loads a text vectors file (one `word v1 v2 ...` per line).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| value_err(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let store = EmbeddingStore::load_vectors(text).map_err(value_err)?;
        Ok(Lexicon { store: Arc::new(store) })
    }

    fn similarity(&self, a: &str, b: &str) -> f64 {
        self.store.similarity(a, b).score
    }

    fn __len__(&self) -> usize {
        self.store.len()
    }
}

/// An app description together with its GUI and prediction models.
#[pyclass(module = "s2r_assist", frozen)]
struct App {
    bundle: Arc<AppBundle>,
}

#[pymethods]
impl App {
    /// Loads `<apps_dir>/<app_id>.json` and the models under `models_dir`.
    #[staticmethod]
    fn load(apps_dir: PathBuf, models_dir: PathBuf, app_id: &str) -> PyResult<Self> {
        let bundle = AppBundle::load(&apps_dir, &models_dir, app_id).map_err(value_err)?;
        Ok(App { bundle: Arc::new(bundle) })
    }

    /// Builds all models in memory from an app description and a trace dir.
    #[staticmethod]
    #[pyo3(signature = (app_json, traces_dir, order=None, sn=None, discount=DEFAULT_DISCOUNT))]
    fn build(app_json: PathBuf, traces_dir: PathBuf, order: Option<usize>, sn: Option<usize>, discount: f64) -> PyResult<Self> {
        let spec = load_spec(&app_json).map_err(value_err)?;
        let traces = load_traces(&traces_dir).map_err(value_err)?;
        let opts = BuildOptions { order, suggestion_len: sn, discount, ..BuildOptions::default() };
        let models = build_models(&spec, &traces, &opts).map_err(value_err)?;
        Ok(App { bundle: Arc::new(AppBundle { spec, models }) })
    }

    /// Writes the model artifacts; returns the app's model directory.
    fn write_models(&self, models_dir: PathBuf) -> PyResult<PathBuf> {
        self.bundle.models.write(&models_dir).map_err(runtime_err)
    }

    #[getter]
    fn app_id(&self) -> &str {
        self.bundle.app_id()
    }

    #[getter]
    fn initial_screen(&self) -> String {
        let gm = self.bundle.gm();
        gm.screen_name(gm.initial_screen()).to_string()
    }

    /// Chosen order, suggestion count and score of both models.
    fn selection(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.bundle.models.selection)
    }

    fn screens(&self) -> Vec<String> {
        let gm = self.bundle.gm();
        gm.screen_ids().map(|s| gm.screen_name(s).to_string()).collect()
    }

    /// Hops between two screens, or None when unreachable.
    fn distance(&self, from: &str, to: &str) -> PyResult<Option<usize>> {
        let gm = self.bundle.gm();
        let (a, b) = match (gm.screen_id(from), gm.screen_id(to)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(PyValueError::new_err(format!("unknown screen `{from}` or `{to}`"))),
        };
        Ok(gm.shortest_path_len(a, b))
    }
}

/// One interactive reporting session.
#[pyclass(module = "s2r_assist")]
struct Session {
    inner: ReportingSession,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (app, lexicon, alpha=0.5, beta=0.5, unreachable_as_max=false))]
    fn new(app: &App, lexicon: &Lexicon, alpha: f64, beta: f64, unreachable_as_max: bool) -> PyResult<Self> {
        let params = ranking(alpha, beta, unreachable_as_max)?;
        Ok(Session { inner: ReportingSession::open(app.bundle.clone(), lexicon.store.clone(), params) })
    }

    #[getter]
    fn session_id(&self) -> &str {
        self.inner.session_id()
    }

    /// Applies one edit. `new_text` is the inserted text; pass
    /// `delete=True` for a deletion. Returns the session snapshot.
    #[pyo3(signature = (full_text, new_text="", delete=false, revision=None))]
    fn update(&mut self, py: Python<'_>, full_text: &str, new_text: &str, delete: bool, revision: Option<u64>) -> PyResult<Py<PyAny>> {
        let edit = if delete { Edit::delete() } else { Edit::insert(new_text) };
        let res = self.inner.on_text_change(full_text, &edit, revision).map_err(value_err)?;
        to_py(py, &res)
    }

    fn snapshot(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.snapshot())
    }

    #[getter]
    fn current_screen(&self) -> Option<&str> {
        self.inner.current_screen()
    }

    #[getter]
    fn revision(&self) -> u64 {
        self.inner.revision()
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.is_closed()
    }

    /// Freezes the description into a report stored under `reports_dir`.
    #[pyo3(signature = (reports_dir, title="", description="", expected="", observed=""))]
    fn submit(
        &mut self,
        py: Python<'_>,
        reports_dir: PathBuf,
        title: &str,
        description: &str,
        expected: &str,
        observed: &str,
    ) -> PyResult<Py<PyAny>> {
        let store = ReportStore::open(&reports_dir).map_err(runtime_err)?;
        let fields = ReportFields {
            title: title.into(),
            description: description.into(),
            expected: expected.into(),
            observed: observed.into(),
        };
        let report = self.inner.submit(fields, &store).map_err(value_err)?;
        to_py(py, &report)
    }

    /// Replays the validated steps in the app simulator.
    fn replay(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &replay_entities(&self.inner.app().spec, self.inner.entities()))
    }
}

/// Interpolated Kneser-Ney n-gram model over token sequences.
#[pyclass(module = "s2r_assist", frozen)]
struct NgramModel {
    inner: CoreNgram,
}

#[pymethods]
impl NgramModel {
    #[new]
    #[pyo3(signature = (sequences, order, discount=DEFAULT_DISCOUNT))]
    fn new(sequences: Vec<Vec<String>>, order: usize, discount: f64) -> PyResult<Self> {
        let inner = CoreNgram::train_with_discount(&sequences, order, discount).map_err(value_err)?;
        Ok(NgramModel { inner })
    }

    #[staticmethod]
    fn from_artifact(text: &str) -> PyResult<Self> {
        Ok(NgramModel { inner: CoreNgram::from_artifact(text).map_err(value_err)? })
    }

    fn to_artifact(&self) -> String {
        self.inner.to_artifact()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn vocabulary(&self) -> Vec<String> {
        self.inner.vocabulary().to_vec()
    }

    /// P(token | context), or None when the context is out of vocabulary.
    fn prob(&self, context: Vec<String>, token: &str) -> Option<f64> {
        self.inner.prob(&context, token)
    }

    fn distribution(&self, context: Vec<String>) -> Option<std::collections::BTreeMap<String, f64>> {
        self.inner.next_distribution_map(&context)
    }

    #[pyo3(signature = (context, k=None))]
    fn suggest(&self, context: Vec<String>, k: Option<usize>) -> Vec<String> {
        let ranked = self.inner.rank(&context);
        ranked.into_iter().take(k.unwrap_or(usize::MAX)).map(String::from).collect()
    }
}

/// Abstract action of one clause, or None when no rule matches.
#[pyfunction]
fn extract_aga(py: Python<'_>, clause: &str) -> PyResult<Option<Py<PyAny>>> {
    nlp::extract_aga(clause).map(|a| to_py(py, &a)).transpose()
}

/// Suggestion kind for an unfinished sentence: PARTICLE, PARAM, TARGET or NONE.
#[pyfunction]
fn classify_partial(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &nlp::classify_partial(text))
}

/// `(we, c)` for one suggestion list.
#[pyfunction]
fn score_suggestions(shown: Vec<String>, expected: &str) -> (u64, u64) {
    predictor::score_suggestions(&shown, expected)
}

/// Grid-searched order and suggestion count for `sequences`.
#[pyfunction]
#[pyo3(signature = (sequences, kind="GAPM"))]
fn select_model(py: Python<'_>, sequences: Vec<Vec<String>>, kind: &str) -> PyResult<Py<PyAny>> {
    let kind = parse_kind(kind)?;
    let (cfg, res) = py.detach(|| predictor::select_model(&sequences, kind)).map_err(value_err)?;
    to_py(py, &serde_json::json!({ "config": cfg, "score": res, "wes": res.wes() }))
}

#[pymodule]
fn s2r_assist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lexicon>()?;
    m.add_class::<App>()?;
    m.add_class::<Session>()?;
    m.add_class::<NgramModel>()?;
    m.add_function(wrap_pyfunction!(extract_aga, m)?)?;
    m.add_function(wrap_pyfunction!(classify_partial, m)?)?;
    m.add_function(wrap_pyfunction!(score_suggestions, m)?)?;
    m.add_function(wrap_pyfunction!(select_model, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse_case_insensitively() {
        assert_eq!(parse_kind("gepm").unwrap(), ModelKind::Gepm);
        assert_eq!(parse_kind("GAPM").unwrap(), ModelKind::Gapm);
    }

    #[test]
    fn ranking_rejects_out_of_range() {
        assert!(ranking(1.5, 0.5, false).is_err());
        assert_eq!(ranking(0.5, 0.5, false).unwrap(), RankingParams::default());
    }
}
