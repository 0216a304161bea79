//! Reference computations written independently of the library internals.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use s2r_core::ngram::NgramModel;
use s2r_core::predictor::{tasks_for, ModelKind};

fn count(corpus: &[Vec<String>], gram: &[String]) -> u64 {
    corpus
        .iter()
        .map(|s| s.windows(gram.len()).filter(|w| *w == gram).count() as u64)
        .sum()
}

/// Number of distinct tokens seen immediately before `gram`.
fn left_extensions(corpus: &[Vec<String>], gram: &[String]) -> u64 {
    let mut seen = BTreeSet::new();
    for s in corpus {
        for w in s.windows(gram.len() + 1) {
            if w[1..] == *gram {
                seen.insert(w[0].clone());
            }
        }
    }
    seen.len() as u64
}

/// Interpolated Kneser-Ney probability of `w` after `ctx`, straight from the
/// recursive definition. Returns `None` if a context token is unseen.
pub fn kn_prob(corpus: &[Vec<String>], order: usize, d: f64, ctx: &[String], w: &str) -> Option<f64> {
    let vocab: BTreeSet<&String> = corpus.iter().flatten().collect();
    let ctx = &ctx[ctx.len().saturating_sub(order - 1)..];
    if ctx.iter().any(|t| !vocab.contains(t)) {
        return None;
    }
    let v = vocab.len() as f64;
    // level `j` conditions on the last j context tokens; the highest level
    // uses raw counts, lower ones use left-extension counts
    #[allow(clippy::too_many_arguments)]
    fn level(corpus: &[Vec<String>], vocab: &BTreeSet<&String>, v: f64, d: f64, ctx: &[String], j: isize, top: usize, w: &str) -> f64 {
        if j < 0 {
            return 1.0 / v;
        }
        let j = j as usize;
        let h = &ctx[ctx.len() - j..];
        let f = |x: &str| -> u64 {
            let mut g = h.to_vec();
            g.push(x.to_string());
            if j == top {
                count(corpus, &g)
            } else {
                left_extensions(corpus, &g)
            }
        };
        let lower = level(corpus, vocab, v, d, ctx, j as isize - 1, top, w);
        let total: u64 = vocab.iter().map(|x| f(x)).sum();
        if total == 0 {
            return lower;
        }
        let types = vocab.iter().filter(|x| f(x) > 0).count() as f64;
        let t = total as f64;
        (f(w) as f64 - d).max(0.0) / t + d * types / t * lower
    }
    Some(level(corpus, &vocab, v, d, ctx, ctx.len() as isize, ctx.len(), w))
}

pub fn kn_distribution(corpus: &[Vec<String>], order: usize, d: f64, ctx: &[String]) -> Option<BTreeMap<String, f64>> {
    let vocab: BTreeSet<&String> = corpus.iter().flatten().collect();
    vocab
        .into_iter()
        .map(|w| kn_prob(corpus, order, d, ctx, w).map(|p| (w.clone(), p)))
        .collect()
}

fn tok(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

/// Twenty small corpora with their model orders.
pub fn toy_corpora() -> Vec<(Vec<Vec<String>>, usize)> {
    (0..20u64)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(1000 + seed);
            let v = rng.gen_range(2..=6);
            let n_seq = rng.gen_range(1..=5);
            let corpus = (0..n_seq)
                .map(|_| {
                    let len = rng.gen_range(1..=10);
                    (0..len).map(|_| tok(rng.gen_range(0..v))).collect()
                })
                .collect();
            (corpus, 1 + (seed as usize % 4))
        })
        .collect()
}

/// Every context of length 0..order over the corpus vocabulary (capped).
pub fn contexts(corpus: &[Vec<String>], order: usize) -> Vec<Vec<String>> {
    let vocab: Vec<String> = corpus.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 1..order {
        let mut next = Vec::new();
        for c in &frontier {
            for w in &vocab {
                let mut c2: Vec<String> = c.clone();
                c2.push(w.clone());
                next.push(c2);
            }
        }
        next.truncate(200);
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Exhaustive leave-one-out search over (order, suggestion count) in
/// [1,10]², each cell trained and scored from scratch. Returns the first
/// minimal cell as (order, sn, Σwe, Σc).
pub fn exhaustive_grid(traces: &[Vec<String>], kind: ModelKind) -> (usize, usize, u64, u64) {
    let mut best: Option<(usize, usize, u64, u64)> = None;
    for order in 1..=10 {
        for sn in 1..=10 {
            let (mut we, mut c) = (0u64, 0u64);
            for held in 0..traces.len() {
                let train: Vec<Vec<String>> = traces
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != held)
                    .map(|(_, s)| s.clone())
                    .collect();
                let model = NgramModel::train(&train, order).ok();
                for t in tasks_for(&traces[held], kind) {
                    let shown: Vec<String> = model
                        .as_ref()
                        .map(|m| m.rank(&t.context).into_iter().take(sn).map(String::from).collect())
                        .unwrap_or_default();
                    match shown.iter().position(|s| *s == t.expected) {
                        Some(r) => {
                            we += r as u64;
                            c += 1;
                        }
                        None => we += shown.len() as u64,
                    }
                }
            }
            let better = match best {
                None => true,
                Some((_, _, bwe, bc)) => match (c, bc) {
                    (0, _) => false,
                    (_, 0) => true,
                    _ => (we as u128) * (bc as u128) < (bwe as u128) * (c as u128),
                },
            };
            if better {
                best = Some((order, sn, we, c));
            }
        }
    }
    best.expect("grid is non-empty")
}

/// Five synthetic trace sets of 10 to 14 sequences drawn from small
/// first- and second-order Markov sources.
pub fn synthetic_sets() -> Vec<Vec<Vec<String>>> {
    (0..5u64)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(77 + seed);
            let v = rng.gen_range(3..=6);
            let n = rng.gen_range(10..=14);
            (0..n)
                .map(|_| {
                    let len = rng.gen_range(3..=9);
                    let mut s: Vec<usize> = vec![rng.gen_range(0..v)];
                    while s.len() < len {
                        let prev = *s.last().unwrap();
                        let prev2 = if s.len() > 1 { s[s.len() - 2] } else { 0 };
                        let next = if rng.gen_bool(0.75) {
                            (prev + prev2 * (seed as usize % 2) + 1) % v
                        } else {
                            rng.gen_range(0..v)
                        };
                        s.push(next);
                    }
                    s.into_iter().map(tok).collect()
                })
                .collect()
        })
        .collect()
}

/// Corpora whose next token is a function of the previous three tokens, so
/// that a context of length three is needed for confident prediction.
pub fn markov4_corpora() -> Vec<(String, Vec<Vec<String>>)> {
    (0..3u64)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(4000 + seed);
            let v = 5;
            let seqs = (0..12)
                .map(|_| {
                    let len = rng.gen_range(8..=14);
                    let mut s: Vec<usize> = (0..3).map(|_| rng.gen_range(0..v)).collect();
                    while s.len() < len {
                        let k = s.len();
                        let next = if rng.gen_bool(0.9) {
                            (s[k - 1] + 2 * s[k - 2] + 3 * s[k - 3] + seed as usize) % v
                        } else {
                            rng.gen_range(0..v)
                        };
                        s.push(next);
                    }
                    s.into_iter().map(tok).collect()
                })
                .collect();
            (format!("markov4-{seed}"), seqs)
        })
        .collect()
}

/// Flow corpora with order-4 dependencies. Two flows share the middle
/// `B C`; the token three back decides the follower. `A B C W` is the
/// frequent flow, while `x_i B C V` recurs with many different `x_i`, so a
/// held-out `x_i B C` context is often unseen and the backoff decides.
pub fn order4_corpora() -> Vec<(String, Vec<Vec<String>>)> {
    (0..3u64)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(4100 + seed);
            let xs = 8;
            let seqs = (0..15)
                .map(|_| {
                    let mut s: Vec<String> = Vec::new();
                    for _ in 0..rng.gen_range(3..=4) {
                        let r: f64 = rng.gen();
                        if r < 0.5 {
                            s.extend(["A", "B", "C", "W"].map(String::from));
                        } else if r < 0.8 {
                            s.push(format!("x{}", rng.gen_range(0..xs)));
                            s.extend(["B", "C", "V"].map(String::from));
                        } else {
                            s.push(format!("f{}", rng.gen_range(0..3)));
                            s.push(format!("x{}", rng.gen_range(0..xs)));
                        }
                    }
                    s
                })
                .collect();
            (format!("order4-{seed}"), seqs)
        })
        .collect()
}

pub const SENTENCE_POOL: [&str; 14] = [
    "Click the \"Create account\" button.",
    "Enter \"Checking\" in the \"Account name\" field.",
    "Click the \"Save\" button.",
    "Tap the \"new transaction\" button.",
    "Enter \"Rent\" in the \"Description\" text box.",
    "Type \"100\" in the \"Amount\" field.",
    "Click the \"Withdrawal\" toggle.",
    "Rotate the screen.",
    "Click the \"Navigate up\" button.",
    "Open the settings and click the \"Dark theme\" checkbox.",
    "Click the purple elephant.",
    "Then nothing happens.",
    "Scroll down on the \"transactions list\" list.",
    "Click the \"Settings\" element.",
];

/// A random sequence of description texts produced by appending,
/// deleting, replacing and truncating sentences.
pub fn edit_script(seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut sents: Vec<String> = Vec::new();
    let mut tail = String::new();
    let mut out = Vec::new();
    let steps = rng.gen_range(3..=12);
    for _ in 0..steps {
        match rng.gen_range(0..5) {
            0 | 1 => sents.push(SENTENCE_POOL[rng.gen_range(0..SENTENCE_POOL.len())].to_string()),
            2 if !sents.is_empty() => {
                let i = rng.gen_range(0..sents.len());
                sents.remove(i);
            }
            3 if !sents.is_empty() => {
                let i = rng.gen_range(0..sents.len());
                sents[i] = SENTENCE_POOL[rng.gen_range(0..SENTENCE_POOL.len())].to_string();
            }
            _ => {
                let s = SENTENCE_POOL[rng.gen_range(0..SENTENCE_POOL.len())];
                let cut = rng.gen_range(0..s.len());
                tail = s.chars().take(cut).collect();
            }
        }
        let mut text = sents.join(" ");
        if !tail.is_empty() && rng.gen_bool(0.5) {
            text.push(' ');
            text.push_str(&tail);
        }
        out.push(text);
    }
    out
}
