//! Next-token predictors trained on traces: wasted-effort scoring,
//! leave-one-out selection of model order and suggestion count, the
//! all-k-order Markov (AKOM) baseline, and the comparison report.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ngram::{NgramError, NgramModel, MAX_ORDER};

/// Largest suggestion list considered during selection.
pub const MAX_SUGGESTIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    /// Predicts whole GUI actions from GAT sequences.
    Gapm,
    /// Predicts element tokens from GET sequences.
    Gepm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Gapm => "GAPM",
            ModelKind::Gepm => "GEPM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Ngram,
    Akom,
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Technique::Ngram => "n-gram",
            Technique::Akom => "AKOM",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionTask {
    pub context: Vec<String>,
    pub expected: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WesResult {
    pub total_we: u64,
    pub total_correct: u64,
    pub tasks: usize,
}

impl WesResult {
    /// Σwe / Σc, undefined when no suggestion was ever correct.
    pub fn wes(&self) -> Option<f64> {
        (self.total_correct > 0).then(|| self.total_we as f64 / self.total_correct as f64)
    }

    fn add(&mut self, we: u64, c: u64) {
        self.total_we += we;
        self.total_correct += c;
        self.tasks += 1;
    }

    /// Exact comparison of scores; undefined sorts after every defined score.
    pub fn cmp_wes(&self, other: &WesResult) -> Ordering {
        match (self.total_correct, other.total_correct) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            (c1, c2) => {
                let l = self.total_we as u128 * c2 as u128;
                let r = other.total_we as u128 * c1 as u128;
                l.cmp(&r)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub technique: Technique,
    pub order: usize,
    pub suggestion_len: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("need at least 2 sequences for leave-one-out selection, got {0}")]
    TooFewSequences(usize),
    #[error("no configuration produced a correct suggestion")]
    NoCorrectSuggestion,
    #[error(transparent)]
    Ngram(#[from] NgramError),
}

/// Wasted effort of one suggestion list: `(we, c)`. A hit at 1-based rank r
/// costs r-1; a miss costs every suggestion shown.
pub fn score_suggestions<S: AsRef<str>>(shown: &[S], expected: &str) -> (u64, u64) {
    match shown.iter().position(|s| s.as_ref() == expected) {
        Some(r) => (r as u64, 1),
        None => (shown.len() as u64, 0),
    }
}

pub fn wasted_effort_score<F, S>(
    tasks: &[PredictionTask],
    mut suggester: F,
    suggestion_len: usize,
) -> WesResult
where
    F: FnMut(&[String]) -> Vec<S>,
    S: AsRef<str>,
{
    let mut out = WesResult::default();
    for t in tasks {
        let list = suggester(&t.context);
        let shown = &list[..list.len().min(suggestion_len)];
        let (we, c) = score_suggestions(shown, &t.expected);
        out.add(we, c);
    }
    out
}

/// Prediction tasks of one held-out sequence. GAPM scores every position
/// after the first; GEPM scores only element tokens (odd positions), each
/// with the full preceding GET prefix as context.
pub fn tasks_for(seq: &[String], kind: ModelKind) -> Vec<PredictionTask> {
    let positions: Box<dyn Iterator<Item = usize>> = match kind {
        ModelKind::Gapm => Box::new(1..seq.len()),
        ModelKind::Gepm => Box::new((1..seq.len()).step_by(2)),
    };
    positions
        .map(|i| PredictionTask {
            context: seq[..i].to_vec(),
            expected: seq[i].clone(),
        })
        .collect()
}

/// All-k-order Markov baseline: frequency tables for every context length up
/// to `max_order`; queries use the longest matching suffix.
#[derive(Debug, Clone)]
pub struct AkomModel {
    max_order: usize,
    tables: Vec<HashMap<Vec<String>, BTreeMap<String, u64>>>,
}

impl AkomModel {
    pub fn train(traces: &[Vec<String>], max_order: usize) -> Self {
        let max_order = max_order.max(1);
        let mut tables = vec![HashMap::new(); max_order];
        for seq in traces {
            for i in 1..seq.len() {
                for k in 1..=max_order.min(i) {
                    let ctx = seq[i - k..i].to_vec();
                    *tables[k - 1]
                        .entry(ctx)
                        .or_insert_with(BTreeMap::new)
                        .entry(seq[i].clone())
                        .or_insert(0) += 1;
                }
            }
        }
        AkomModel { max_order, tables }
    }

    pub fn rank<S: AsRef<str>>(&self, context: &[S]) -> Vec<String> {
        for k in (1..=self.max_order.min(context.len())).rev() {
            let ctx: Vec<String> = context[context.len() - k..]
                .iter()
                .map(|s| s.as_ref().to_string())
                .collect();
            if let Some(f) = self.tables[k - 1].get(&ctx) {
                let mut v: Vec<(&String, &u64)> = f.iter().collect();
                // BTreeMap order is lexicographic; stable sort keeps it for ties
                v.sort_by(|a, b| b.1.cmp(a.1));
                return v.into_iter().map(|(t, _)| t.clone()).collect();
            }
        }
        Vec::new()
    }
}

pub fn akom_suggest<S: AsRef<str>>(
    traces: &[Vec<String>],
    max_order: usize,
    context: &[S],
    k: usize,
) -> Vec<String> {
    let mut r = AkomModel::train(traces, max_order).rank(context);
    r.truncate(k);
    r
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub config: ModelConfig,
    pub result: WesResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    pub best: GridCell,
}

/// Leave-one-out rankings (top [`MAX_SUGGESTIONS`]) for every task of every
/// held-out sequence, for one model order.
fn loo_rankings(
    traces: &[Vec<String>],
    kind: ModelKind,
    technique: Technique,
    order: usize,
) -> Result<Vec<(Vec<String>, String)>, PredictError> {
    let mut out = Vec::new();
    for held in 0..traces.len() {
        let train: Vec<Vec<String>> = traces
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != held)
            .map(|(_, s)| s.clone())
            .collect();
        let tasks = tasks_for(&traces[held], kind);
        match technique {
            Technique::Ngram => {
                let model = match NgramModel::train(&train, order) {
                    Ok(m) => Some(m),
                    Err(NgramError::EmptyCorpus) => None,
                    Err(e) => return Err(e.into()),
                };
                for t in tasks {
                    let ranked = model
                        .as_ref()
                        .map(|m| {
                            m.suggest_topk(&t.context, MAX_SUGGESTIONS)
                                .into_iter()
                                .map(String::from)
                                .collect()
                        })
                        .unwrap_or_default();
                    out.push((ranked, t.expected));
                }
            }
            Technique::Akom => {
                let model = AkomModel::train(&train, order);
                for t in tasks {
                    let mut ranked = model.rank(&t.context);
                    ranked.truncate(MAX_SUGGESTIONS);
                    out.push((ranked, t.expected));
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates every (order, suggestion_len) cell in [1,10]² by leave-one-out
/// cross-validation. Each model is trained once per (order, fold) and its
/// rankings are reused for all suggestion lengths.
pub fn grid_search(
    traces: &[Vec<String>],
    kind: ModelKind,
    technique: Technique,
) -> Result<GridReport, PredictError> {
    if traces.len() < 2 {
        return Err(PredictError::TooFewSequences(traces.len()));
    }
    let mut cells = Vec::with_capacity(MAX_ORDER * MAX_SUGGESTIONS);
    for order in 1..=MAX_ORDER {
        let rankings = loo_rankings(traces, kind, technique, order)?;
        for sn in 1..=MAX_SUGGESTIONS {
            let mut r = WesResult::default();
            for (ranked, expected) in &rankings {
                let shown = &ranked[..ranked.len().min(sn)];
                let (we, c) = score_suggestions(shown, expected);
                r.add(we, c);
            }
            cells.push(GridCell {
                config: ModelConfig {
                    kind,
                    technique,
                    order,
                    suggestion_len: sn,
                },
                result: r,
            });
        }
    }
    // cells are generated in (order, sn) order, so min_by keeps the first
    // (smallest order, then smallest sn) among equal scores
    let best = *cells
        .iter()
        .min_by(|a, b| a.result.cmp_wes(&b.result))
        .expect("grid is non-empty");
    if best.result.total_correct == 0 {
        return Err(PredictError::NoCorrectSuggestion);
    }
    Ok(GridReport { cells, best })
}

/// Picks the n-gram order and suggestion count with the lowest
/// leave-one-out wasted-effort score.
pub fn select_model(
    traces: &[Vec<String>],
    kind: ModelKind,
) -> Result<(ModelConfig, WesResult), PredictError> {
    let g = grid_search(traces, kind, Technique::Ngram)?;
    Ok((g.best.config, g.best.result))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub app: String,
    pub kind: ModelKind,
    pub technique: Technique,
    pub traces: usize,
    pub predictions: usize,
    pub order: usize,
    pub sn: usize,
    pub wes: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scoring: String,
    pub rows: Vec<ComparisonRow>,
}

/// Token corpora of one app, one entry per trace.
#[derive(Debug, Clone, Default)]
pub struct AppCorpus {
    pub app: String,
    pub gat: Vec<Vec<String>>,
    pub get: Vec<Vec<String>>,
}

impl AppCorpus {
    pub fn sequences(&self, kind: ModelKind) -> &[Vec<String>] {
        match kind {
            ModelKind::Gapm => &self.gat,
            ModelKind::Gepm => &self.get,
        }
    }
}

pub fn compare_models(
    corpora: &[AppCorpus],
    kinds: &[ModelKind],
) -> Result<ComparisonReport, PredictError> {
    let mut rows = Vec::new();
    for c in corpora {
        for &kind in kinds {
            let seqs = c.sequences(kind);
            let predictions = seqs.iter().map(|s| tasks_for(s, kind).len()).sum();
            for technique in [Technique::Ngram, Technique::Akom] {
                let g = grid_search(seqs, kind, technique)?;
                rows.push(ComparisonRow {
                    app: c.app.clone(),
                    kind,
                    technique,
                    traces: seqs.len(),
                    predictions,
                    order: g.best.config.order,
                    sn: g.best.config.suggestion_len,
                    wes: g.best.result.wes(),
                });
            }
        }
    }
    Ok(ComparisonReport {
        scoring: "leave-one-out over sequences; every position >= 1 scored with backoff; \
                  GEPM scores element positions only"
            .to_string(),
        rows,
    })
}

impl ComparisonReport {
    pub const COLUMNS: [&'static str; 8] =
        ["App", "Kind", "Model", "Traces", "Predictions", "Order", "SN", "wes"];

    pub fn to_text(&self) -> String {
        let mut table: Vec<Vec<String>> = vec![Self::COLUMNS.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            table.push(vec![
                r.app.clone(),
                r.kind.to_string(),
                r.technique.to_string(),
                r.traces.to_string(),
                r.predictions.to_string(),
                r.order.to_string(),
                r.sn.to_string(),
                r.wes.map_or("undefined".to_string(), |w| format!("{w:.3}")),
            ]);
        }
        let widths: Vec<usize> = (0..Self::COLUMNS.len())
            .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out.push_str(&format!("# {}\n", self.scoring));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
