use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerbClass {
    Click,
    Type,
    Scroll,
    Rotate,
}

/// Word lists driving normalization and parsing. Loadable from JSON; the
/// defaults are bundled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NlpConfig {
    pub click_verbs: Vec<String>,
    pub type_verbs: Vec<String>,
    pub scroll_verbs: Vec<String>,
    pub rotate_verbs: Vec<String>,
    /// Lowercase word → canonical word. Values must not be keys.
    pub synonyms: BTreeMap<String, String>,
    pub directions: Vec<String>,
    pub determiners: Vec<String>,
    pub prepositions: Vec<String>,
    /// Words skipped before the verb ("please", "then", ...).
    pub fillers: Vec<String>,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

impl Default for NlpConfig {
    fn default() -> Self {
        let synonyms = [
            ("tap", "click"),
            ("touch", "click"),
            ("hit", "click"),
            ("push", "click"),
            ("clicking", "click"),
            ("tapping", "click"),
            ("typing", "type"),
            ("entering", "enter"),
            ("insert", "enter"),
            ("flick", "swipe"),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        NlpConfig {
            click_verbs: words("click press select choose open"),
            type_verbs: words("type enter write input fill"),
            scroll_verbs: words("scroll swipe"),
            rotate_verbs: words("rotate turn"),
            synonyms,
            directions: words("up down left right"),
            determiners: words("the a an this that these those my your its"),
            prepositions: words(
                "in into on onto at to from for of with inside within under below above near via by through over",
            ),
            fillers: words("please then first next now finally and also"),
        }
    }
}

impl NlpConfig {
    pub fn builtin() -> &'static NlpConfig {
        static CFG: OnceLock<NlpConfig> = OnceLock::new();
        CFG.get_or_init(NlpConfig::default)
    }

    pub fn from_json(s: &str) -> Result<NlpConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    fn has(list: &[String], w: &str) -> bool {
        list.iter().any(|x| x.eq_ignore_ascii_case(w))
    }

    pub fn verb_class(&self, word: &str) -> Option<VerbClass> {
        if Self::has(&self.click_verbs, word) {
            Some(VerbClass::Click)
        } else if Self::has(&self.type_verbs, word) {
            Some(VerbClass::Type)
        } else if Self::has(&self.scroll_verbs, word) {
            Some(VerbClass::Scroll)
        } else if Self::has(&self.rotate_verbs, word) {
            Some(VerbClass::Rotate)
        } else {
            None
        }
    }

    pub fn is_direction(&self, w: &str) -> bool {
        Self::has(&self.directions, w)
    }

    pub fn is_determiner(&self, w: &str) -> bool {
        Self::has(&self.determiners, w)
    }

    pub fn is_preposition(&self, w: &str) -> bool {
        Self::has(&self.prepositions, w)
    }

    pub fn is_filler(&self, w: &str) -> bool {
        Self::has(&self.fillers, w)
    }

    pub fn synonym(&self, w: &str) -> Option<&str> {
        self.synonyms.get(&w.to_lowercase()).map(String::as_str)
    }
}
