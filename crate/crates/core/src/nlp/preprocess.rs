use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lexicon::NlpConfig;
use super::segment::is_open_quote;
use crate::gui_model::GuiModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocessed {
    pub text: String,
    /// Placeholder token → the element name it replaced.
    pub placeholders: BTreeMap<String, String>,
}

/// Normalizes a sentence against the element texts of `gm`.
pub fn preprocess(sentence: &str, gm: &GuiModel) -> Preprocessed {
    let texts: Vec<&str> = gm.elements().iter().map(|e| e.text.as_str()).collect();
    preprocess_with(sentence, &texts, NlpConfig::builtin())
}

/// Drops parenthesized content, maps synonyms to canonical words, and
/// replaces multi-word element names (as written, in title case or in
/// sentence case) with placeholder tokens. Quoted spans are left untouched.
pub fn preprocess_with(sentence: &str, element_texts: &[&str], cfg: &NlpConfig) -> Preprocessed {
    let text = tidy(&drop_parentheticals(sentence));
    let text = normalize_words(&text, cfg);
    let mut names: Vec<&str> = element_texts
        .iter()
        .copied()
        .filter(|t| t.split_whitespace().count() >= 2)
        .collect();
    names.sort_by(|a, b| {
        b.split_whitespace()
            .count()
            .cmp(&a.split_whitespace().count())
            .then(b.len().cmp(&a.len()))
            .then(a.cmp(b))
    });
    names.dedup();
    let mut out = text;
    let mut placeholders = BTreeMap::new();
    for name in names {
        let lower = name.to_lowercase();
        let mut variants = vec![name.to_string(), title_case(&lower), sentence_case(&lower)];
        variants.dedup();
        for v in variants {
            while let Some(pos) = find_unquoted(&out, &v) {
                let key = placeholders
                    .iter()
                    .find(|(_, s)| **s == v)
                    .map(|(k, _): (&String, &String)| k.clone())
                    .unwrap_or_else(|| format!("__E{}__", placeholders.len()));
                placeholders.insert(key.clone(), v.clone());
                out.replace_range(pos..pos + v.len(), &key);
            }
        }
    }
    Preprocessed {
        text: out,
        placeholders,
    }
}

/// Replaces placeholder tokens with the names they stand for.
pub fn expand_placeholders(text: &str, placeholders: &BTreeMap<String, String>) -> String {
    let mut out = text.to_string();
    // longer keys first so __E1__ never clobbers part of __E10__
    let mut keys: Vec<&String> = placeholders.keys().collect();
    keys.sort_by_key(|k| std::cmp::Reverse(k.len()));
    for k in keys {
        out = out.replace(k.as_str(), &placeholders[k]);
    }
    out
}

fn drop_parentheticals(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    let mut in_quote = false;
    for c in s.chars() {
        if depth == 0 && is_open_quote(c) {
            in_quote = !in_quote;
        }
        if !in_quote {
            if c == '(' {
                depth += 1;
                continue;
            }
            if c == ')' && depth > 0 {
                depth -= 1;
                continue;
            }
        }
        if depth == 0 {
            out.push(c);
        }
    }
    out
}

/// Collapses runs of spaces and removes spaces before punctuation.
fn tidy(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c == ' ' && (out.is_empty() || out.ends_with(' ')) {
            continue;
        }
        if matches!(c, '.' | ',' | ';' | ':' | '!' | '?') && out.ends_with(' ') {
            out.pop();
        }
        out.push(c);
    }
    out.trim().to_string()
}

fn normalize_words(s: &str, cfg: &NlpConfig) -> String {
    let mut out = String::with_capacity(s.len());
    let mut word = String::new();
    let mut in_quote = false;
    let flush = |word: &mut String, out: &mut String| {
        if let Some(canon) = cfg.synonym(word) {
            if word.chars().next().is_some_and(char::is_uppercase) {
                out.push_str(&sentence_case(canon));
            } else {
                out.push_str(canon);
            }
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in s.chars() {
        if is_open_quote(c) {
            flush(&mut word, &mut out);
            in_quote = !in_quote;
            out.push(c);
        } else if in_quote {
            out.push(c);
        } else if c.is_alphanumeric() || c == '_' || c == '\'' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

fn sentence_case(lower: &str) -> String {
    let mut c = lower.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn title_case(lower: &str) -> String {
    lower
        .split(' ')
        .map(sentence_case)
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Byte offset of the first whole-word occurrence of `needle` outside quotes.
fn find_unquoted(hay: &str, needle: &str) -> Option<usize> {
    let mut quoted = vec![false; hay.len() + 1];
    let mut in_quote = false;
    for (i, c) in hay.char_indices() {
        if is_open_quote(c) {
            in_quote = !in_quote;
        }
        for q in quoted.iter_mut().skip(i).take(c.len_utf8()) {
            *q = in_quote || is_open_quote(c);
        }
    }
    let mut from = 0;
    while let Some(off) = hay[from..].find(needle) {
        let pos = from + off;
        let end = pos + needle.len();
        let before_ok = hay[..pos].chars().next_back().is_none_or(|c| !is_word_char(c));
        let after_ok = hay[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok && !quoted[pos..end].iter().any(|q| *q) {
            return Some(pos);
        }
        from = pos + hay[pos..].chars().next().map_or(1, char::len_utf8);
    }
    None
}
