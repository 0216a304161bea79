//! Pattern parser for imperative S2R clauses. It recognizes the shape
//! `[filler*] [long] VERB [prt] [NP] (PREP NP?)*` and emits typed arcs.

use serde::{Deserialize, Serialize};

use super::lexicon::{NlpConfig, VerbClass};
use super::segment::is_open_quote;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Word text, or the content of a quoted span without its quotes.
    pub text: String,
    pub quoted: bool,
    /// False for a quoted span still missing its closing quote.
    pub closed: bool,
    pub punct: bool,
}

impl Token {
    fn word(s: &str) -> Token {
        Token {
            text: s.to_string(),
            quoted: false,
            closed: true,
            punct: false,
        }
    }

    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }

    /// Surface form; quoted spans render with straight quotes.
    pub fn render(&self) -> String {
        if self.quoted {
            if self.closed {
                format!("\"{}\"", self.text)
            } else {
                format!("\"{}", self.text)
            }
        } else {
            self.text.clone()
        }
    }

    fn is_word(&self) -> bool {
        !self.quoted && !self.punct
    }
}

/// Splits a clause into words, atomic quoted spans and punctuation marks.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<Token>| {
        if !word.is_empty() {
            out.push(Token::word(word));
            word.clear();
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if is_open_quote(c) {
            flush(&mut word, &mut out);
            let mut inner = String::new();
            let mut closed = false;
            i += 1;
            while i < chars.len() {
                if is_open_quote(chars[i]) {
                    closed = true;
                    break;
                }
                inner.push(chars[i]);
                i += 1;
            }
            out.push(Token {
                text: inner,
                quoted: true,
                closed,
                punct: false,
            });
        } else if c.is_alphanumeric()
            || c == '_'
            || c == '-'
            || c == '\''
            || (c == '.' && !word.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric()))
        {
            word.push(c);
        } else if c.is_whitespace() {
            flush(&mut word, &mut out);
        } else {
            flush(&mut word, &mut out);
            out.push(Token {
                text: c.to_string(),
                quoted: false,
                closed: true,
                punct: true,
            });
        }
        i += 1;
    }
    flush(&mut word, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcLabel {
    Dobj,
    Prep,
    Pobj,
    Advmod,
    Prt,
    Det,
    Compound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub head: usize,
    pub dep: usize,
    pub label: ArcLabel,
}

/// Dependency analysis of one clause over its non-punctuation tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseParse {
    pub tokens: Vec<Token>,
    pub root: Option<usize>,
    pub arcs: Vec<Arc>,
}

impl ClauseParse {
    pub fn deps(&self, head: usize, label: ArcLabel) -> impl Iterator<Item = usize> + '_ {
        self.arcs
            .iter()
            .filter(move |a| a.head == head && a.label == label)
            .map(|a| a.dep)
    }

    pub fn dep(&self, head: usize, label: ArcLabel) -> Option<usize> {
        self.deps(head, label).next()
    }

    /// Token indices of the subtree under `n`, in sentence order, skipping
    /// subtrees reached through any label in `exclude`.
    pub fn tree(&self, n: usize, exclude: &[ArcLabel]) -> Vec<usize> {
        let mut out = vec![n];
        let mut stack = vec![n];
        while let Some(h) = stack.pop() {
            for a in &self.arcs {
                if a.head == h && !exclude.contains(&a.label) {
                    out.push(a.dep);
                    stack.push(a.dep);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn render(&self, idx: &[usize]) -> String {
        idx.iter()
            .map(|&i| self.tokens[i].render())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn verb_class(&self, cfg: &NlpConfig) -> Option<VerbClass> {
        let r = self.root?;
        if !self.tokens[r].is_word() {
            return None;
        }
        cfg.verb_class(&self.tokens[r].text)
    }

    pub fn is_long(&self) -> bool {
        self.root
            .and_then(|r| self.dep(r, ArcLabel::Advmod))
            .is_some_and(|a| self.tokens[a].lower() == "long")
    }

    /// A noun phrase made only of determiners ("the").
    pub fn is_det_only(&self, head: usize, cfg: &NlpConfig) -> bool {
        self.tree(head, &[ArcLabel::Prep])
            .iter()
            .all(|&i| self.tokens[i].is_word() && cfg.is_determiner(&self.tokens[i].text))
    }

    /// Prepositions attached to the verb or chained through pobjs, in order.
    pub fn preps(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .arcs
            .iter()
            .filter(|a| a.label == ArcLabel::Prep)
            .map(|a| a.dep)
            .collect();
        v.sort_unstable();
        v
    }
}

pub fn parse_clause(clause: &str) -> ClauseParse {
    parse_clause_with(clause, NlpConfig::builtin())
}

pub(crate) fn parse_clause_with(clause: &str, cfg: &NlpConfig) -> ClauseParse {
    let mut tokens: Vec<Token> = Vec::new();
    for t in tokenize(clause).into_iter().filter(|t| !t.punct) {
        // "long-click" → "long" "click"
        if t.is_word() {
            if let Some(rest) = t.lower().strip_prefix("long-") {
                if cfg.verb_class(rest).is_some() {
                    tokens.push(Token::word(&t.text[..4]));
                    tokens.push(Token::word(&t.text[5..]));
                    continue;
                }
            }
        }
        tokens.push(t);
    }
    let mut arcs = Vec::new();
    let n = tokens.len();
    let mut i = 0;
    while i < n && tokens[i].is_word() && cfg.is_filler(&tokens[i].text) {
        i += 1;
    }
    let mut advmod = None;
    if i + 1 < n && tokens[i].is_word() && tokens[i].lower() == "long" {
        advmod = Some(i);
        i += 1;
    }
    if i >= n {
        return ClauseParse {
            tokens,
            root: advmod,
            arcs,
        };
    }
    let root = i;
    if let Some(a) = advmod {
        arcs.push(Arc {
            head: root,
            dep: a,
            label: ArcLabel::Advmod,
        });
    }
    i += 1;
    let scroll = tokens[root].is_word() && cfg.verb_class(&tokens[root].text) == Some(VerbClass::Scroll);
    let is_prep = |t: &Token| t.is_word() && cfg.is_preposition(&t.text);
    let is_dir = |t: &Token| t.is_word() && cfg.is_direction(&t.text);
    if scroll && i < n && is_dir(&tokens[i]) {
        arcs.push(Arc {
            head: root,
            dep: i,
            label: ArcLabel::Prt,
        });
        i += 1;
    }

    let np_end = |from: usize| -> usize {
        let mut j = from;
        while j < n && !is_prep(&tokens[j]) {
            j += 1;
        }
        j
    };
    let attach_np = |arcs: &mut Vec<Arc>, from: usize, to: usize, head_of: usize, label: ArcLabel| -> Option<usize> {
        if from >= to {
            return None;
        }
        let head = to - 1;
        arcs.push(Arc {
            head: head_of,
            dep: head,
            label,
        });
        for j in from..head {
            let l = if tokens[j].is_word() && cfg.is_determiner(&tokens[j].text) {
                ArcLabel::Det
            } else {
                ArcLabel::Compound
            };
            arcs.push(Arc { head, dep: j, label: l });
        }
        Some(head)
    };

    // direct object, possibly followed by a scroll direction ("the list down")
    let mut end = np_end(i);
    if scroll && end > i && is_dir(&tokens[end - 1]) && !arcs.iter().any(|a| a.label == ArcLabel::Prt) {
        arcs.push(Arc {
            head: root,
            dep: end - 1,
            label: ArcLabel::Prt,
        });
        attach_np(&mut arcs, i, end - 1, root, ArcLabel::Dobj);
    } else {
        attach_np(&mut arcs, i, end, root, ArcLabel::Dobj);
    }
    i = end;

    // prepositional phrases: the first hangs off the verb, later ones off the
    // previous prepositional object
    let mut attach_to = root;
    while i < n {
        let p = i;
        arcs.push(Arc {
            head: attach_to,
            dep: p,
            label: ArcLabel::Prep,
        });
        end = np_end(p + 1);
        match attach_np(&mut arcs, p + 1, end, p, ArcLabel::Pobj) {
            Some(h) => attach_to = h,
            None => attach_to = p,
        }
        i = end;
    }
    ClauseParse {
        tokens,
        root: Some(root),
        arcs,
    }
}
