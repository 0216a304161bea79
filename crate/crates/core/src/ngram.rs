//! Closed-vocabulary n-gram language model with interpolated Kneser-Ney
//! smoothing.
//!
//! For a query with context `h` (truncated to the last `n-1` tokens) the top
//! level uses raw counts of `h w`; every lower level uses continuation counts
//! `N1+(• h' w)`. The unigram level is interpolated with the uniform
//! distribution over the vocabulary. A context never seen at some level
//! passes the lower-order distribution through unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

pub const MAX_ORDER: usize = 10;
pub const DEFAULT_DISCOUNT: f64 = 0.75;
const FORMAT_HEADER: &str = "s2r-ngram v1";
const SMOOTHING: &str = "interpolated-kneser-ney";

#[derive(Debug, Error, PartialEq)]
pub enum NgramError {
    #[error("training corpus has no tokens")]
    EmptyCorpus,
    #[error("model order {0} outside 1..=10")]
    BadOrder(usize),
    #[error("discount {0} outside (0, 1]")]
    BadDiscount(f64),
    #[error("token {0:?} is empty or contains a line break")]
    BadToken(String),
    #[error("model artifact: {0}")]
    Format(String),
}

type Gram = Vec<u32>;

/// Follower counts for every history of one length.
#[derive(Debug, Clone, Default, PartialEq)]
struct Level {
    followers: HashMap<Gram, BTreeMap<u32, u64>>,
    totals: HashMap<Gram, u64>,
}

impl Level {
    fn add(&mut self, history: &[u32], w: u32, c: u64) {
        *self
            .followers
            .entry(history.to_vec())
            .or_default()
            .entry(w)
            .or_insert(0) += c;
        *self.totals.entry(history.to_vec()).or_insert(0) += c;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    discount: f64,
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    /// `counts[k-1]` maps each observed k-gram to its raw count.
    counts: Vec<HashMap<Gram, u64>>,
    /// `raw[k-1]`: raw k-gram counts grouped by (k-1)-token history.
    raw: Vec<Level>,
    /// `cont[k-1]`: continuation counts of k-grams (k < order) grouped by history.
    cont: Vec<Level>,
}

impl NgramModel {
    pub fn train<S: AsRef<str>>(sequences: &[Vec<S>], order: usize) -> Result<Self, NgramError> {
        Self::train_with_discount(sequences, order, DEFAULT_DISCOUNT)
    }

    pub fn train_with_discount<S: AsRef<str>>(
        sequences: &[Vec<S>],
        order: usize,
        discount: f64,
    ) -> Result<Self, NgramError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(NgramError::BadOrder(order));
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(NgramError::BadDiscount(discount));
        }
        let mut vocab: Vec<String> = sequences
            .iter()
            .flatten()
            .map(|t| t.as_ref().to_string())
            .collect();
        vocab.sort();
        vocab.dedup();
        if vocab.is_empty() {
            return Err(NgramError::EmptyCorpus);
        }
        if let Some(bad) = vocab.iter().find(|t| t.is_empty() || t.contains(['\n', '\r'])) {
            return Err(NgramError::BadToken(bad.clone()));
        }
        let index: HashMap<String, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let mut counts: Vec<HashMap<Gram, u64>> = vec![HashMap::new(); order];
        for seq in sequences {
            let ids: Vec<u32> = seq.iter().map(|t| index[t.as_ref()]).collect();
            for k in 1..=order {
                for g in ids.windows(k) {
                    *counts[k - 1].entry(g.to_vec()).or_insert(0) += 1;
                }
            }
        }
        Ok(Self::from_counts(order, discount, vocab, index, counts))
    }

    fn from_counts(
        order: usize,
        discount: f64,
        vocab: Vec<String>,
        index: HashMap<String, u32>,
        counts: Vec<HashMap<Gram, u64>>,
    ) -> Self {
        let mut raw = vec![Level::default(); order];
        let mut cont = vec![Level::default(); order];
        for (k0, table) in counts.iter().enumerate() {
            for g in table.keys() {
                let (w, h) = g.split_last().expect("non-empty gram");
                raw[k0].add(h, *w, table[g]);
                if k0 >= 1 {
                    // g = v h' w contributes one left extension to (h' w)
                    let (_, rest) = g.split_first().expect("non-empty gram");
                    let (w2, h2) = rest.split_last().expect("k >= 2");
                    cont[k0 - 1].add(h2, *w2, 1);
                }
            }
        }
        NgramModel {
            order,
            discount,
            vocab,
            index,
            counts,
            raw,
            cont,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Vocabulary in lexicographic order; token ids index into it.
    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// Raw count of an n-gram of any stored order.
    pub fn count(&self, gram: &[&str]) -> u64 {
        if gram.is_empty() || gram.len() > self.order {
            return 0;
        }
        let Some(ids) = gram.iter().map(|t| self.token_id(t)).collect::<Option<Gram>>() else {
            return 0;
        };
        self.counts[ids.len() - 1].get(&ids).copied().unwrap_or(0)
    }

    /// Maps the last `n-1` context tokens to ids, or `None` when any of them
    /// is out of vocabulary.
    fn context_ids<S: AsRef<str>>(&self, context: &[S]) -> Option<Gram> {
        let start = context.len().saturating_sub(self.order - 1);
        context[start..]
            .iter()
            .map(|t| self.token_id(t.as_ref()))
            .collect()
    }

    fn distribution_ids(&self, ctx: &[u32]) -> Vec<f64> {
        let v = self.vocab.len();
        let d = self.discount;
        let mut p = vec![1.0 / v as f64; v];
        let top = ctx.len();
        // level j uses the last j context tokens as history
        for j in 0..=top {
            let h = &ctx[top - j..];
            let level = if j == top { &self.raw[j] } else { &self.cont[j] };
            let (Some(total), Some(fol)) = (level.totals.get(h), level.followers.get(h)) else {
                continue;
            };
            if *total == 0 {
                continue;
            }
            let total = *total as f64;
            let lambda = d * fol.len() as f64 / total;
            for x in p.iter_mut() {
                *x *= lambda;
            }
            for (&w, &c) in fol {
                p[w as usize] += (c as f64 - d).max(0.0) / total;
            }
        }
        p
    }

    /// Probability of every vocabulary token (indexed by token id) after
    /// `context`, or `None` when the effective context holds an
    /// out-of-vocabulary token and no suggestion may be made.
    pub fn next_distribution<S: AsRef<str>>(&self, context: &[S]) -> Option<Vec<f64>> {
        let ids = self.context_ids(context)?;
        Some(self.distribution_ids(&ids))
    }

    /// Same as [`NgramModel::next_distribution`], keyed by token.
    pub fn next_distribution_map<S: AsRef<str>>(
        &self,
        context: &[S],
    ) -> Option<BTreeMap<String, f64>> {
        let p = self.next_distribution(context)?;
        Some(self.vocab.iter().cloned().zip(p).collect())
    }

    pub fn prob<S: AsRef<str>>(&self, context: &[S], token: &str) -> Option<f64> {
        let id = self.token_id(token)?;
        Some(self.next_distribution(context)?[id as usize])
    }

    /// Whole vocabulary ranked by probability, ties in lexicographic order.
    pub fn rank<S: AsRef<str>>(&self, context: &[S]) -> Vec<&str> {
        let Some(p) = self.next_distribution(context) else {
            return Vec::new();
        };
        let mut ids: Vec<usize> = (0..p.len()).collect();
        // ids are already lexicographic, and the sort is stable
        ids.sort_by(|a, b| p[*b].total_cmp(&p[*a]));
        ids.into_iter().map(|i| self.vocab[i].as_str()).collect()
    }

    pub fn suggest_topk<S: AsRef<str>>(&self, context: &[S], k: usize) -> Vec<&str> {
        let mut r = self.rank(context);
        r.truncate(k);
        r
    }

    /// Text artifact: header, vocabulary, then count tables sorted by gram.
    pub fn to_artifact(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{FORMAT_HEADER}").unwrap();
        writeln!(s, "order {}", self.order).unwrap();
        writeln!(s, "discount {}", self.discount).unwrap();
        writeln!(s, "smoothing {SMOOTHING}").unwrap();
        writeln!(s, "vocab {}", self.vocab.len()).unwrap();
        for t in &self.vocab {
            writeln!(s, "{t}").unwrap();
        }
        for (k0, table) in self.counts.iter().enumerate() {
            writeln!(s, "counts {} {}", k0 + 1, table.len()).unwrap();
            let mut grams: Vec<_> = table.iter().collect();
            grams.sort();
            for (g, c) in grams {
                let ids: Vec<String> = g.iter().map(u32::to_string).collect();
                writeln!(s, "{}\t{}", ids.join(" "), c).unwrap();
            }
        }
        s
    }

    pub fn from_artifact(text: &str) -> Result<Self, NgramError> {
        let err = |m: &str| NgramError::Format(m.to_string());
        let mut lines = text.lines();
        let mut next = || lines.next().ok_or_else(|| err("truncated artifact"));
        let header = next()?;
        if header != FORMAT_HEADER {
            return Err(NgramError::Format(format!(
                "unsupported header `{header}`, expected `{FORMAT_HEADER}`"
            )));
        }
        fn field<'a>(line: &'a str, name: &str) -> Result<&'a str, NgramError> {
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| NgramError::Format(format!("expected `{name}` line")))
        }
        let order: usize = field(next()?, "order")?
            .parse()
            .map_err(|_| err("bad order"))?;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(NgramError::BadOrder(order));
        }
        let discount: f64 = field(next()?, "discount")?
            .parse()
            .map_err(|_| err("bad discount"))?;
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(NgramError::BadDiscount(discount));
        }
        if field(next()?, "smoothing")? != SMOOTHING {
            return Err(err("unsupported smoothing"));
        }
        let nv: usize = field(next()?, "vocab")?
            .parse()
            .map_err(|_| err("bad vocab size"))?;
        let mut vocab = Vec::with_capacity(nv);
        for _ in 0..nv {
            vocab.push(next()?.to_string());
        }
        if nv == 0 || vocab.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err("vocabulary must be non-empty, sorted and unique"));
        }
        let mut counts = Vec::with_capacity(order);
        for k in 1..=order {
            let line = field(next()?, "counts")?;
            let (kk, n) = line.split_once(' ').ok_or_else(|| err("bad counts line"))?;
            if kk.parse::<usize>().ok() != Some(k) {
                return Err(err("count tables out of order"));
            }
            let n: usize = n.parse().map_err(|_| err("bad table size"))?;
            let mut table = HashMap::with_capacity(n);
            for _ in 0..n {
                let (g, c) = next()?.split_once('\t').ok_or_else(|| err("bad count row"))?;
                let ids = g
                    .split(' ')
                    .map(|x| x.parse::<u32>().ok().filter(|&i| (i as usize) < nv))
                    .collect::<Option<Gram>>()
                    .filter(|ids| ids.len() == k)
                    .ok_or_else(|| err("bad gram"))?;
                let c: u64 = c.parse().map_err(|_| err("bad count"))?;
                table.insert(ids, c);
            }
            counts.push(table);
        }
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Self::from_counts(order, discount, vocab, index, counts))
    }
}
