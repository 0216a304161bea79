#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use s2r_core::bundle::{build_models, load_spec, load_traces, AppBundle, BuildOptions, BuiltModels};
use s2r_core::similarity::EmbeddingStore;
use s2r_core::spec::AppSpec;
use s2r_core::traces::TraceTuple;

pub const GOLDEN_STEPS: [&str; 8] = [
    "Click the \"Create account\" button.",
    "Enter \"Checking\" in the \"Account name\" field.",
    "Click the \"Save\" button.",
    "Tap the \"new transaction\" button.",
    "Enter \"Rent\" in the \"Description\" text box.",
    "Type \"100\" in the \"Amount\" field.",
    "Click the \"Withdrawal\" toggle.",
    "Click the \"Save\" button.",
];

pub const FAILURE_ID: &str = "deposit-not-saved";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn spec() -> AppSpec {
    load_spec(&fixtures().join("gnucash/app.json")).unwrap()
}

pub fn traces() -> Vec<Vec<TraceTuple>> {
    load_traces(&fixtures().join("gnucash/traces")).unwrap()
}

pub fn models() -> &'static BuiltModels {
    static M: OnceLock<BuiltModels> = OnceLock::new();
    M.get_or_init(|| build_models(&spec(), &traces(), &BuildOptions::default()).unwrap())
}

pub fn bundle() -> Arc<AppBundle> {
    static B: OnceLock<Arc<AppBundle>> = OnceLock::new();
    B.get_or_init(|| {
        Arc::new(AppBundle {
            spec: spec(),
            models: models().clone(),
        })
    })
    .clone()
}

pub fn lexicon_text() -> String {
    std::fs::read_to_string(fixtures().join("lexicon.vec")).unwrap()
}

pub fn store() -> Arc<EmbeddingStore> {
    static S: OnceLock<Arc<EmbeddingStore>> = OnceLock::new();
    S.get_or_init(|| Arc::new(EmbeddingStore::load_vectors(&lexicon_text()).unwrap()))
        .clone()
}

/// Writes the fixture app and freshly built models into `root`, returning
/// (apps dir, models dir, reports dir).
pub fn install(root: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let apps = root.join("apps");
    let models_dir = root.join("models");
    let reports = root.join("reports");
    std::fs::create_dir_all(&apps).unwrap();
    std::fs::copy(fixtures().join("gnucash/app.json"), apps.join("gnucash.json")).unwrap();
    models().write(&models_dir).unwrap();
    (apps, models_dir, reports)
}
pub mod oracles;
