//! Building, persisting and loading the per-app model artifacts.
//!
//! Layout of a models directory:
//!
//! ```text
//! <models-dir>/<app_id>/gui_model.json
//! <models-dir>/<app_id>/gapm.ngram
//! <models-dir>/<app_id>/gepm.ngram
//! <models-dir>/<app_id>/selection.json
//! ```
//!
//! App descriptions live at `<apps-dir>/<app_id>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::app_sim::{explore_dft, extract_declared_model, replay, ReplayOutcome, SimAction, SimError, DEFAULT_STEP_CAP};
use crate::gui_model::{GuiModel, GuiModelError};
use crate::ngram::{NgramError, NgramModel, DEFAULT_DISCOUNT};
use crate::predictor::{grid_search, ModelKind, PredictError, Technique, WesResult, MAX_SUGGESTIONS};
use crate::resolver::S2REntity;
use crate::spec::AppSpec;
use crate::traces::{parse_trace, refine_model, to_gat, to_get, TraceError, TraceTuple};

pub const GUI_MODEL_FILE: &str = "gui_model.json";
pub const GAPM_FILE: &str = "gapm.ngram";
pub const GEPM_FILE: &str = "gepm.ngram";
pub const SELECTION_FILE: &str = "selection.json";

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("missing model file {0}")]
    Missing(PathBuf),
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error(transparent)]
    Model(#[from] GuiModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Trace { path: PathBuf, source: TraceError },
    #[error("{kind}: {source}")]
    Predict { kind: ModelKind, source: PredictError },
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error("{0}")]
    Invalid(String),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> BuildError + '_ {
    move |source| BuildError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_file(path: &Path) -> Result<String, BuildError> {
    if !path.exists() {
        return Err(BuildError::Missing(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(io(path))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), BuildError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn load_spec(path: &Path) -> Result<AppSpec, BuildError> {
    let spec = AppSpec::from_json(&read_file(path)?)?;
    spec.validate()?;
    Ok(spec)
}

/// Reads every `*.trace` file of `dir` in file-name order.
pub fn load_traces(dir: &Path) -> Result<Vec<Vec<TraceTuple>>, BuildError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "trace"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            parse_trace(&read_file(p)?).map_err(|source| BuildError::Trace {
                path: p.clone(),
                source,
            })
        })
        .collect()
}

/// Static model ∪ explored model, refined with the traces.
pub fn build_gui_model(spec: &AppSpec, traces: &[Vec<TraceTuple>], step_cap: usize) -> Result<GuiModel, BuildError> {
    let gm_s = extract_declared_model(spec)?;
    let gm_d = explore_dft(spec, step_cap)?;
    let mut gm = refine_model(&GuiModel::union(&gm_s, &gm_d), traces);
    gm.finalize();
    Ok(gm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Fixed n-gram order; restricts or bypasses the grid search.
    pub order: Option<usize>,
    /// Fixed suggestion count; restricts or bypasses the grid search.
    pub suggestion_len: Option<usize>,
    pub discount: f64,
    pub step_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            order: None,
            suggestion_len: None,
            discount: DEFAULT_DISCOUNT,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedModel {
    pub order: usize,
    pub suggestion_len: usize,
    /// "grid" when chosen by search, "override" when both values were fixed.
    pub source: String,
    /// Leave-one-out score of the chosen cell; absent when the grid was bypassed.
    pub score: Option<WesResult>,
    pub wes: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub app_id: String,
    pub traces: usize,
    pub discount: f64,
    pub gapm: SelectedModel,
    pub gepm: SelectedModel,
}

impl Selection {
    pub fn get(&self, kind: ModelKind) -> &SelectedModel {
        match kind {
            ModelKind::Gapm => &self.gapm,
            ModelKind::Gepm => &self.gepm,
        }
    }
}

fn check_range(name: &str, v: Option<usize>, max: usize) -> Result<(), BuildError> {
    match v {
        Some(x) if !(1..=max).contains(&x) => Err(BuildError::Invalid(format!("{name} {x} outside [1, {max}]"))),
        _ => Ok(()),
    }
}

/// Chooses order and suggestion count for one model kind.
pub fn select_for(seqs: &[Vec<String>], kind: ModelKind, opts: &BuildOptions) -> Result<SelectedModel, BuildError> {
    check_range("order", opts.order, crate::ngram::MAX_ORDER)?;
    check_range("suggestion count", opts.suggestion_len, MAX_SUGGESTIONS)?;
    if let (Some(order), Some(sn)) = (opts.order, opts.suggestion_len) {
        return Ok(SelectedModel {
            order,
            suggestion_len: sn,
            source: "override".into(),
            score: None,
            wes: None,
        });
    }
    let grid = grid_search(seqs, kind, Technique::Ngram).map_err(|source| BuildError::Predict { kind, source })?;
    let best = grid
        .cells
        .iter()
        .filter(|c| opts.order.is_none_or(|o| c.config.order == o))
        .filter(|c| opts.suggestion_len.is_none_or(|s| c.config.suggestion_len == s))
        .min_by(|a, b| a.result.cmp_wes(&b.result))
        .expect("restricted grid is non-empty");
    Ok(SelectedModel {
        order: best.config.order,
        suggestion_len: best.config.suggestion_len,
        source: "grid".into(),
        score: Some(best.result),
        wes: best.result.wes(),
    })
}

#[derive(Debug, Clone)]
pub struct BuiltModels {
    pub gm: GuiModel,
    pub gapm: NgramModel,
    pub gepm: NgramModel,
    pub selection: Selection,
}

pub fn build_models(spec: &AppSpec, traces: &[Vec<TraceTuple>], opts: &BuildOptions) -> Result<BuiltModels, BuildError> {
    if traces.is_empty() {
        return Err(BuildError::Invalid("no usage traces".into()));
    }
    let gm = build_gui_model(spec, traces, opts.step_cap)?;
    let gat: Vec<Vec<String>> = traces.iter().map(|t| to_gat(t)).collect();
    let get: Vec<Vec<String>> = traces.iter().map(|t| to_get(t)).collect();
    let gapm_sel = select_for(&gat, ModelKind::Gapm, opts)?;
    let gepm_sel = select_for(&get, ModelKind::Gepm, opts)?;
    let gapm = NgramModel::train_with_discount(&gat, gapm_sel.order, opts.discount)?;
    let gepm = NgramModel::train_with_discount(&get, gepm_sel.order, opts.discount)?;
    Ok(BuiltModels {
        gm,
        gapm,
        gepm,
        selection: Selection {
            app_id: spec.app_id.clone(),
            traces: traces.len(),
            discount: opts.discount,
            gapm: gapm_sel,
            gepm: gepm_sel,
        },
    })
}

impl BuiltModels {
    pub fn write(&self, models_dir: &Path) -> Result<PathBuf, BuildError> {
        let dir = models_dir.join(&self.selection.app_id);
        write_atomic(&dir.join(GUI_MODEL_FILE), &(self.gm.to_json() + "\n"))?;
        write_atomic(&dir.join(GAPM_FILE), &self.gapm.to_artifact())?;
        write_atomic(&dir.join(GEPM_FILE), &self.gepm.to_artifact())?;
        let sel = serde_json::to_string_pretty(&self.selection).expect("selection serializes");
        write_atomic(&dir.join(SELECTION_FILE), &(sel + "\n"))?;
        Ok(dir)
    }

    pub fn load(models_dir: &Path, app_id: &str) -> Result<BuiltModels, BuildError> {
        let dir = models_dir.join(app_id);
        let ngram = |name: &str| -> Result<NgramModel, BuildError> {
            let p = dir.join(name);
            NgramModel::from_artifact(&read_file(&p)?).map_err(|e| BuildError::Format {
                path: p.clone(),
                reason: e.to_string(),
            })
        };
        let gm_path = dir.join(GUI_MODEL_FILE);
        let gm = GuiModel::from_json(&read_file(&gm_path)?).map_err(|e| BuildError::Format {
            path: gm_path.clone(),
            reason: e.to_string(),
        })?;
        let sel_path = dir.join(SELECTION_FILE);
        let selection: Selection = serde_json::from_str(&read_file(&sel_path)?).map_err(|e| BuildError::Format {
            path: sel_path.clone(),
            reason: e.to_string(),
        })?;
        Ok(BuiltModels {
            gm,
            gapm: ngram(GAPM_FILE)?,
            gepm: ngram(GEPM_FILE)?,
            selection,
        })
    }
}

/// Everything a reporting session needs for one app.
#[derive(Debug, Clone)]
pub struct AppBundle {
    pub spec: AppSpec,
    pub models: BuiltModels,
}

impl AppBundle {
    pub fn app_id(&self) -> &str {
        &self.spec.app_id
    }

    pub fn gm(&self) -> &GuiModel {
        &self.models.gm
    }

    pub fn suggestion_len(&self, kind: ModelKind) -> usize {
        self.models.selection.get(kind).suggestion_len
    }

    pub fn load(apps_dir: &Path, models_dir: &Path, app_id: &str) -> Result<AppBundle, BuildError> {
        let spec = load_spec(&apps_dir.join(format!("{app_id}.json")))?;
        let models = BuiltModels::load(models_dir, app_id)?;
        if spec.app_id != app_id || models.gm.app_id() != app_id {
            return Err(BuildError::Invalid(format!("artifacts in {} do not belong to app `{app_id}`", models_dir.display())));
        }
        Ok(AppBundle { spec, models })
    }
}

/// Apps with a description in `apps_dir`, sorted by id.
pub fn list_app_ids(apps_dir: &Path) -> Result<Vec<String>, BuildError> {
    let mut ids: Vec<String> = fs::read_dir(apps_dir)
        .map_err(io(apps_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(String::from))
        .collect();
    ids.sort();
    Ok(ids)
}

/// Simulator actions of the validated entities, in order.
pub fn entity_actions(entities: &[S2REntity]) -> Vec<SimAction> {
    entities.iter().filter_map(|e| e.action.as_ref()).map(|a| a.to_sim_action()).collect()
}

pub fn replay_entities(spec: &AppSpec, entities: &[S2REntity]) -> ReplayOutcome {
    replay(spec, &entity_actions(entities))
}
