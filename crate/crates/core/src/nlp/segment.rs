use super::lexicon::NlpConfig;

pub const TERMINATORS: [char; 3] = ['.', '!', '?'];

pub(crate) fn is_open_quote(c: char) -> bool {
    matches!(c, '"' | '\u{201c}' | '\u{201d}')
}

/// One sentence of a description, as a byte range into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
    /// Ends with a terminator followed by whitespace or end of text.
    pub terminated: bool,
}

impl SentenceSpan {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

/// Splits text into sentences. A terminator counts only outside quotes and
/// parentheses and when followed by whitespace or the end of the text.
/// Whitespace between sentences is not part of any span; a trailing
/// unterminated remainder is returned with `terminated == false`.
pub fn split_sentences(text: &str) -> Vec<SentenceSpan> {
    let mut out = Vec::new();
    let mut in_quote = false;
    let mut depth = 0usize;
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        if is_open_quote(c) {
            in_quote = !in_quote;
            continue;
        }
        if in_quote {
            continue;
        }
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if TERMINATORS.contains(&c) && depth == 0 => {
                let next = chars.get(k + 1).map(|x| x.1);
                if next.is_none_or(char::is_whitespace) {
                    out.push(SentenceSpan {
                        start: start.take().expect("set above"),
                        end: i + c.len_utf8(),
                        terminated: true,
                    });
                }
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let end = text.trim_end().len();
        if end > s {
            out.push(SentenceSpan {
                start: s,
                end,
                terminated: false,
            });
        }
    }
    out
}

/// Splits one sentence into clauses at semicolons, at "then", and at
/// "and"/"or"/"," when the next word (after an optional "then") is a known
/// verb. A trailing terminator is dropped.
pub fn split_clauses(sentence: &str) -> Vec<String> {
    split_clauses_with(sentence, NlpConfig::builtin())
}

pub(crate) fn split_clauses_with(sentence: &str, cfg: &NlpConfig) -> Vec<String> {
    let s = sentence.trim();
    let s = s.strip_suffix(TERMINATORS).unwrap_or(s).trim_end();
    // pieces: (text, is_word) outside quotes; quotes are kept as one piece
    let mut pieces: Vec<(String, bool)> = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars().peekable();
    let flush = |cur: &mut String, pieces: &mut Vec<(String, bool)>| {
        if !cur.is_empty() {
            pieces.push((std::mem::take(cur), true));
        }
    };
    while let Some(c) = chars.next() {
        if is_open_quote(c) {
            cur.push(c);
            for d in chars.by_ref() {
                cur.push(d);
                if is_open_quote(d) {
                    break;
                }
            }
        } else if c.is_whitespace() {
            flush(&mut cur, &mut pieces);
        } else if c == ',' || c == ';' {
            flush(&mut cur, &mut pieces);
            pieces.push((c.to_string(), false));
        } else {
            cur.push(c);
        }
    }
    flush(&mut cur, &mut pieces);

    let is_verb = |w: &str| cfg.verb_class(w).is_some() || w.eq_ignore_ascii_case("long");
    let mut clauses: Vec<Vec<String>> = vec![Vec::new()];
    let mut i = 0;
    while i < pieces.len() {
        let (p, is_word) = &pieces[i];
        let lower = p.to_lowercase();
        let next_verb = |j: usize| -> bool {
            let mut j = j;
            if pieces.get(j).is_some_and(|(w, _)| w.eq_ignore_ascii_case("then")) {
                j += 1;
            }
            pieces.get(j).is_some_and(|(w, word)| *word && is_verb(w))
        };
        let boundary = if (!is_word && p == ";") || (*is_word && lower == "then") {
            true
        } else if (!is_word && p == ",") || (*is_word && (lower == "and" || lower == "or")) {
            next_verb(i + 1)
        } else {
            false
        };
        if boundary {
            if !clauses.last().expect("non-empty").is_empty() {
                clauses.push(Vec::new());
            }
        } else if !(!is_word && p == ",") || !clauses.last().expect("non-empty").is_empty() {
            clauses.last_mut().expect("non-empty").push(p.clone());
        }
        i += 1;
    }
    clauses
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let mut s = String::new();
            for (k, w) in c.iter().enumerate() {
                if k > 0 && w != "," {
                    s.push(' ');
                }
                s.push_str(w);
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<(&str, bool)> {
        split_sentences(src)
            .iter()
            .map(|s| (s.text(src), s.terminated))
            .collect()
    }

    #[test]
    fn sentences() {
        assert_eq!(
            texts("Click Save. Rotate the screen!  Type \"a. b\" in"),
            vec![
                ("Click Save.", true),
                ("Rotate the screen!", true),
                ("Type \"a. b\" in", false)
            ]
        );
        assert_eq!(texts("Type 1.5 (e.g. this). Done"), vec![("Type 1.5 (e.g. this).", true), ("Done", false)]);
        assert!(texts("   ").is_empty());
        assert_eq!(texts("Click Save."), vec![("Click Save.", true)]);
    }

    #[test]
    fn clauses() {
        assert_eq!(split_clauses("Click Save and rotate the screen."), ["Click Save", "rotate the screen"]);
        assert_eq!(split_clauses("Click Save."), ["Click Save"]);
        assert_eq!(
            split_clauses("Enter \"Transaction\" in the \"Description\" text box."),
            ["Enter \"Transaction\" in the \"Description\" text box"]
        );
        assert_eq!(
            split_clauses("Click Save, then rotate the screen; scroll down"),
            ["Click Save", "rotate the screen", "scroll down"]
        );
        assert_eq!(split_clauses("Click \"Save and click\" button"), ["Click \"Save and click\" button"]);
        assert_eq!(split_clauses("Click the salt and pepper button"), ["Click the salt and pepper button"]);
        assert_eq!(split_clauses("Click X, Y and Z"), ["Click X, Y and Z"]);
    }
}
