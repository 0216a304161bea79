mod common;

use common::oracles::{contexts, kn_distribution, toy_corpora};
use s2r_core::ngram::{NgramModel, DEFAULT_DISCOUNT};

#[test]
fn matches_reference_on_toy_corpora() {
    let corpora = toy_corpora();
    assert_eq!(corpora.len(), 20);
    for (i, (corpus, order)) in corpora.iter().enumerate() {
        let m = NgramModel::train(corpus, *order).unwrap();
        for ctx in contexts(corpus, *order) {
            let want = kn_distribution(corpus, *order, DEFAULT_DISCOUNT, &ctx).unwrap();
            let got = m.next_distribution_map(&ctx).unwrap();
            assert_eq!(got.len(), want.len());
            let sum: f64 = got.values().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "corpus {i} ctx {ctx:?}: sum {sum}");
            for (w, p) in &want {
                assert!((got[w] - p).abs() <= 1e-9, "corpus {i} ctx {ctx:?} w {w}: {} vs {p}", got[w]);
            }
        }
    }
}

#[test]
fn reference_rejects_unseen_context_tokens() {
    let corpus = vec![vec!["a".to_string(), "b".to_string()]];
    let m = NgramModel::train(&corpus, 2).unwrap();
    let ctx = vec!["zz".to_string()];
    assert!(kn_distribution(&corpus, 2, DEFAULT_DISCOUNT, &ctx).is_none());
    assert!(m.next_distribution(&ctx).is_none());
}

#[test]
fn other_discounts_match_reference() {
    for (corpus, order) in toy_corpora().into_iter().take(6) {
        for d in [0.1, 0.5, 1.0] {
            let m = NgramModel::train_with_discount(&corpus, order, d).unwrap();
            for ctx in contexts(&corpus, order).into_iter().take(40) {
                let want = kn_distribution(&corpus, order, d, &ctx).unwrap();
                let got = m.next_distribution_map(&ctx).unwrap();
                for (w, p) in &want {
                    assert!((got[w] - p).abs() <= 1e-9);
                }
            }
        }
    }
}
