//! Word vectors and phrase similarity.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard English stopwords.
pub const STOPWORDS: &[&str] = &[
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
    "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
    "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
    "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
    "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
    "for", "with", "about", "against", "between", "into", "through", "during", "before",
    "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
    "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
    "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
    "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
    "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren",
    "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn",
    "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn", "please", "also",
];

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("vector file is empty")]
    Empty,
    #[error("line {line}: expected {expected} components, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
    stopwords: HashSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub score: f64,
    /// Computed by word overlap because a phrase had no vector.
    pub fallback: bool,
}

/// Lowercased words of a phrase; quotes and punctuation separate words.
pub fn words(phrase: &str) -> Vec<String> {
    phrase
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

impl EmbeddingStore {
    /// Parses the word-vector text format. An optional first line
    /// "count dimension" is skipped; otherwise the first row fixes the
    /// dimension.
    pub fn load_vectors(text: &str) -> Result<EmbeddingStore, EmbeddingError> {
        let mut dimension = None;
        let mut vectors = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.is_empty() {
                continue;
            }
            if i == 0 && parts.len() == 2 && parts.iter().all(|p| p.parse::<usize>().is_ok()) {
                continue;
            }
            let vals = parts[1..]
                .iter()
                .map(|p| p.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbeddingError::Malformed {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            let d = *dimension.get_or_insert(vals.len());
            if vals.len() != d || d == 0 {
                return Err(EmbeddingError::Dimension {
                    line: i + 1,
                    expected: d,
                    found: vals.len(),
                });
            }
            vectors.entry(parts[0].to_lowercase()).or_insert(vals);
        }
        let dimension = dimension.ok_or(EmbeddingError::Empty)?;
        Ok(EmbeddingStore {
            dimension,
            vectors,
            stopwords: STOPWORDS.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn with_stopwords<I: IntoIterator<Item = String>>(mut self, stopwords: I) -> Self {
        self.stopwords = stopwords.into_iter().map(|s| s.to_lowercase()).collect();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn is_stopword(&self, w: &str) -> bool {
        self.stopwords.contains(&w.to_lowercase())
    }

    /// Mean of the vectors of the phrase's in-vocabulary non-stopwords.
    pub fn phrase_vector(&self, phrase: &str) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dimension];
        let mut n = 0usize;
        for w in words(phrase) {
            if self.is_stopword(&w) {
                continue;
            }
            if let Some(v) = self.vectors.get(&w) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        for s in sum.iter_mut() {
            *s /= n as f64;
        }
        Some(sum)
    }

    /// Cosine of the phrase vectors clamped to [0,1], or word-set Jaccard
    /// when either phrase has no vector.
    pub fn similarity(&self, a: &str, b: &str) -> Similarity {
        match (self.phrase_vector(a), self.phrase_vector(b)) {
            (Some(x), Some(y)) => Similarity {
                score: cosine(&x, &y).clamp(0.0, 1.0),
                fallback: false,
            },
            _ => Similarity {
                score: self.jaccard(a, b),
                fallback: true,
            },
        }
    }

    fn jaccard(&self, a: &str, b: &str) -> f64 {
        let content = |p: &str| -> BTreeSet<String> {
            let all: BTreeSet<String> = words(p).into_iter().collect();
            let kept: BTreeSet<String> = all.iter().filter(|w| !self.is_stopword(w)).cloned().collect();
            if kept.is_empty() {
                all
            } else {
                kept
            }
        };
        let (x, y) = (content(a), content(b));
        let union = x.union(&y).count();
        if union == 0 {
            return 0.0;
        }
        x.intersection(&y).count() as f64 / union as f64
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

/// Splits an identifier into lowercase words at underscores, other
/// separators and camel-case boundaries.
pub fn split_identifier(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in raw.split(|c: char| !c.is_alphanumeric()) {
        let chars: Vec<char> = part.chars().collect();
        let mut cur = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let boundary = i > 0
                && c.is_uppercase()
                && (chars[i - 1].is_lowercase()
                    || chars[i - 1].is_ascii_digit()
                    || (chars[i - 1].is_uppercase() && chars.get(i + 1).is_some_and(|n| n.is_lowercase())));
            if boundary && !cur.is_empty() {
                out.push(cur.to_lowercase());
                cur.clear();
            }
            cur.push(c);
        }
        if !cur.is_empty() {
            out.push(cur.to_lowercase());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TINY: &str = "3 2\nsave 1 0\nbutton 0 1\nstore 1 0\n";

    #[test]
    fn loads_small_file() {
        let s = EmbeddingStore::load_vectors(TINY).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.vector("SAVE"), Some(&[1.0, 0.0][..]));
        assert_eq!(EmbeddingStore::load_vectors("").unwrap_err(), EmbeddingError::Empty);
        assert!(matches!(
            EmbeddingStore::load_vectors("a 1 2\nb 1 2 3\n"),
            Err(EmbeddingError::Dimension { line: 2, expected: 2, found: 3 })
        ));
    }

    #[test]
    fn phrase_vectors() {
        let s = EmbeddingStore::load_vectors(TINY).unwrap();
        assert_eq!(s.phrase_vector("save").unwrap(), vec![1.0, 0.0]);
        assert_eq!(s.phrase_vector("in the"), None);
        assert_eq!(s.phrase_vector("save button").unwrap(), vec![0.5, 0.5]);
        assert_eq!(s.phrase_vector("the \"save\" button"), s.phrase_vector("save button"));
    }

    #[test]
    fn similarity_cases() {
        let s = EmbeddingStore::load_vectors(TINY).unwrap();
        assert_eq!(s.similarity("save", "save").score, 1.0);
        assert_eq!(s.similarity("save", "button").score, 0.0);
        let f = s.similarity("frobnicate", "frobnicate widget");
        assert!(f.fallback);
        assert_eq!(f.score, 0.5);
    }

    #[test]
    fn negative_cosine_is_clamped() {
        let s = EmbeddingStore::load_vectors("up 1 0\nnorth -1 0\n").unwrap().with_stopwords(vec![]);
        assert_eq!(s.similarity("up", "north").score, 0.0);
    }

    #[test]
    fn splits_identifiers() {
        assert_eq!(split_identifier("btn_new_transaction"), ["btn", "new", "transaction"]);
        assert_eq!(split_identifier("menuSave"), ["menu", "save"]);
        assert_eq!(split_identifier("save"), ["save"]);
        assert_eq!(split_identifier("HTTPServer2Go"), ["http", "server2", "go"]);
        assert!(split_identifier("").is_empty());
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(
            a in prop::collection::vec(prop::sample::select(vec!["save", "button", "store", "the", "zz"]), 0..4),
            b in prop::collection::vec(prop::sample::select(vec!["save", "button", "store", "the", "zz"]), 0..4),
        ) {
            let s = EmbeddingStore::load_vectors(TINY).unwrap();
            let (a, b) = (a.join(" "), b.join(" "));
            let x = s.similarity(&a, &b);
            let y = s.similarity(&b, &a);
            prop_assert!((x.score - y.score).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&x.score));
            if s.phrase_vector(&a).is_some() {
                prop_assert!((s.similarity(&a, &a).score - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn stopword_insertion_keeps_vector(words in prop::collection::vec(prop::sample::select(vec!["save", "button", "store"]), 1..4)) {
            let s = EmbeddingStore::load_vectors(TINY).unwrap();
            let plain = words.join(" ");
            let padded = format!("the {} of the", words.join(" in "));
            prop_assert_eq!(s.phrase_vector(&plain), s.phrase_vector(&padded));
        }

        #[test]
        fn split_identifier_idempotent(raw in "[a-zA-Z_0-9]{0,20}") {
            let once = split_identifier(&raw);
            prop_assert_eq!(split_identifier(&once.join(" ")), once);
        }
    }
}
