mod common;

use common::oracles::order4_corpora;
use s2r_core::predictor::{compare_models, AppCorpus, ModelKind, Technique};
use s2r_core::traces::{to_gat, to_get};

fn rows_for(report: &s2r_core::predictor::ComparisonReport, app: &str, t: Technique) -> f64 {
    report
        .rows
        .iter()
        .find(|r| r.app == app && r.technique == t)
        .and_then(|r| r.wes)
        .unwrap()
}

#[test]
fn ngram_not_worse_than_akom_on_order4_corpora() {
    let corpora: Vec<AppCorpus> = order4_corpora()
        .into_iter()
        .map(|(app, gat)| AppCorpus { app, gat, get: vec![] })
        .collect();
    let report = compare_models(&corpora, &[ModelKind::Gapm]).unwrap();
    assert_eq!(report.rows.len(), 2 * corpora.len());
    for c in &corpora {
        let ng = rows_for(&report, &c.app, Technique::Ngram);
        let ak = rows_for(&report, &c.app, Technique::Akom);
        assert!(ng <= ak, "{}: n-gram {ng} vs AKOM {ak}", c.app);
    }
}

#[test]
fn fixture_report_has_both_kinds_and_techniques() {
    let traces = common::traces();
    let corpus = AppCorpus {
        app: "gnucash".into(),
        gat: traces.iter().map(|t| to_gat(t)).collect(),
        get: traces.iter().map(|t| to_get(t)).collect(),
    };
    let report = compare_models(&[corpus], &[ModelKind::Gapm, ModelKind::Gepm]).unwrap();
    assert_eq!(report.rows.len(), 4);
    let text = report.to_text();
    assert!(text.starts_with("App"));
    assert!(text.contains("GEPM") && text.contains("AKOM") && text.contains("n-gram"));
    let back: s2r_core::predictor::ComparisonReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn markov4_report_is_complete() {
    let corpora: Vec<AppCorpus> = common::oracles::markov4_corpora()
        .into_iter()
        .map(|(app, gat)| AppCorpus { app, gat, get: vec![] })
        .collect();
    let report = compare_models(&corpora, &[ModelKind::Gapm]).unwrap();
    println!("{}", report.to_text());
    assert_eq!(report.rows.len(), 2 * corpora.len());
    assert!(report.rows.iter().all(|r| r.wes.is_some()));
}
