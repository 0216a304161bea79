//! Grammar rules over clause parses.
//!
//! Action rules, tried in order (first match wins):
//!
//! | id  | pattern                                      | action                         |
//! |-----|----------------------------------------------|--------------------------------|
//! | A2  | C verb, advmod "long", dobj                  | LONG_CLICK, e=tree(dobj)       |
//! | A1  | C verb, dobj                                 | CLICK, e=tree(dobj)            |
//! | A7  | C verb, prep → pobj                          | CLICK, e=tree(pobj)            |
//! | A3  | R verb                                       | ROTATE                         |
//! | A4  | S verb, prt direction, prep → pobj           | SCROLL, e=tree(pobj), p=dir    |
//! | A4b | S verb, prep → pobj                          | SCROLL, e=tree(pobj), p=DOWN   |
//! | A4c | S verb, dobj, optional prt                   | SCROLL, e=tree(dobj), p=dir    |
//! | A4d | S verb, prt direction only                   | SCROLL, p=dir                  |
//! | A8  | T verb, target, "with" → pobj                | TYPE, e=target, p=tree(pobj)   |
//! | A5  | T verb, dobj, prep → pobj                    | TYPE, e=tree(pobj), p=tree(dobj) \ prep |
//!
//! Objects made only of determiners never satisfy a rule.

use serde::{Deserialize, Serialize};

use super::lexicon::{NlpConfig, VerbClass};
use super::parse::{parse_clause_with, ArcLabel, ClauseParse};
use crate::gui_model::ActionKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractGuiAction {
    pub a_type: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_desc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_desc: Option<String>,
}

impl AbstractGuiAction {
    pub fn new(a_type: ActionKind, e_desc: Option<&str>, p_desc: Option<&str>) -> Self {
        AbstractGuiAction {
            a_type,
            e_desc: e_desc.map(String::from),
            p_desc: p_desc.map(String::from),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PartialKind {
    Particle,
    Param,
    Target,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialInfo {
    pub kind: PartialKind,
    /// Words to insert for a PARTICLE suggestion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    /// Action implied by the verb, used to build element-prediction context.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_type: Option<ActionKind>,
}

impl PartialInfo {
    fn none() -> Self {
        PartialInfo {
            kind: PartialKind::None,
            particle: None,
            a_type: None,
        }
    }
}

pub fn extract_aga(clause: &str) -> Option<AbstractGuiAction> {
    extract_aga_with(clause, NlpConfig::builtin())
}

fn real_np(p: &ClauseParse, head: usize, cfg: &NlpConfig) -> bool {
    !p.is_det_only(head, cfg) && p.tokens[head].closed
}

fn pobjs(p: &ClauseParse, cfg: &NlpConfig) -> Vec<(usize, Option<usize>)> {
    p.preps()
        .into_iter()
        .map(|pr| (pr, p.dep(pr, ArcLabel::Pobj).filter(|&o| real_np(p, o, cfg))))
        .collect()
}

fn direction(p: &ClauseParse, root: usize) -> Option<String> {
    p.dep(root, ArcLabel::Prt).map(|d| p.tokens[d].text.to_uppercase())
}

pub(crate) fn extract_aga_with(clause: &str, cfg: &NlpConfig) -> Option<AbstractGuiAction> {
    let p = parse_clause_with(clause, cfg);
    let root = p.root?;
    let class = p.verb_class(cfg)?;
    let dobj = p.dep(root, ArcLabel::Dobj).filter(|&d| real_np(&p, d, cfg));
    let dobj_any = p.dep(root, ArcLabel::Dobj);
    let preps = pobjs(&p, cfg);
    let dangling = preps.iter().any(|(_, o)| o.is_none());
    let first_pobj = preps.first().and_then(|(_, o)| *o);
    let tree = |n: usize| p.render(&p.tree(n, &[]));
    let aga = |a: ActionKind, e: Option<String>, d: Option<String>| {
        Some(AbstractGuiAction {
            a_type: a,
            e_desc: e,
            p_desc: d,
        })
    };
    match class {
        VerbClass::Click => {
            if dangling {
                return None;
            }
            if let Some(d) = dobj {
                let kind = if p.is_long() {
                    ActionKind::LongClick
                } else {
                    ActionKind::Click
                };
                return aga(kind, Some(tree(d)), None);
            }
            if dobj_any.is_none() {
                if let Some(o) = first_pobj {
                    let kind = if p.is_long() {
                        ActionKind::LongClick
                    } else {
                        ActionKind::Click
                    };
                    return aga(kind, Some(tree(o)), None);
                }
            }
            None
        }
        VerbClass::Rotate => aga(ActionKind::Rotate, None, None),
        VerbClass::Scroll => {
            if dangling || (dobj_any.is_some() && dobj.is_none()) {
                return None;
            }
            let dir = direction(&p, root);
            if let Some(o) = first_pobj {
                let e = dobj.map_or_else(|| tree(o), tree);
                return aga(ActionKind::Scroll, Some(e), Some(dir.unwrap_or_else(|| "DOWN".into())));
            }
            if let Some(d) = dobj {
                return aga(ActionKind::Scroll, Some(tree(d)), Some(dir.unwrap_or_else(|| "DOWN".into())));
            }
            dir.map(|d| AbstractGuiAction {
                a_type: ActionKind::Scroll,
                e_desc: None,
                p_desc: Some(d),
            })
        }
        VerbClass::Type => {
            if dangling || (dobj_any.is_some() && dobj.is_none()) {
                return None;
            }
            let with = preps
                .iter()
                .find(|(pr, _)| p.tokens[*pr].lower() == "with")
                .and_then(|(_, o)| *o);
            if let Some(w) = with {
                let target = dobj.or_else(|| {
                    preps
                        .iter()
                        .find(|(pr, _)| p.tokens[*pr].lower() != "with")
                        .and_then(|(_, o)| *o)
                })?;
                let e = p.render(&p.tree(target, &[ArcLabel::Prep]));
                return aga(ActionKind::Type, Some(e), Some(tree(w)));
            }
            let (d, o) = (dobj?, first_pobj?);
            let param = p.render(&p.tree(d, &[ArcLabel::Prep]));
            aga(ActionKind::Type, Some(tree(o)), Some(param))
        }
    }
}

/// Classifies the last clause of the in-progress text after the final
/// sentence terminator.
pub fn classify_partial(partial: &str) -> PartialKind {
    classify_partial_with(partial, NlpConfig::builtin()).kind
}

pub fn classify_partial_info(partial: &str) -> PartialInfo {
    classify_partial_with(partial, NlpConfig::builtin())
}

pub(crate) fn classify_partial_with(partial: &str, cfg: &NlpConfig) -> PartialInfo {
    let clauses = super::segment::split_clauses_with(partial, cfg);
    let Some(last) = clauses.last() else {
        return PartialInfo::none();
    };
    let p = parse_clause_with(last, cfg);
    let (Some(root), Some(class)) = (p.root, p.verb_class(cfg)) else {
        return PartialInfo::none();
    };
    if p.tokens.last().is_some_and(|t| t.quoted && !t.closed) {
        return PartialInfo::none();
    }
    let a_type = match class {
        VerbClass::Click if p.is_long() => ActionKind::LongClick,
        VerbClass::Click => ActionKind::Click,
        VerbClass::Type => ActionKind::Type,
        VerbClass::Scroll => ActionKind::Scroll,
        VerbClass::Rotate => return PartialInfo::none(),
    };
    let info = |kind, particle: Option<&str>| PartialInfo {
        kind,
        particle: particle.map(String::from),
        a_type: Some(a_type),
    };
    let dobj = p.dep(root, ArcLabel::Dobj);
    let preps = p.preps();
    let last_prep = preps.last().copied();
    let bare = dobj.is_none() && preps.is_empty() && p.dep(root, ArcLabel::Prt).is_none();
    match (class, bare) {
        (VerbClass::Click, true) => return info(PartialKind::Particle, Some("the")),
        (VerbClass::Type, true) => return info(PartialKind::Param, None),
        _ => {}
    }
    if let Some(pr) = last_prep {
        return match p.dep(pr, ArcLabel::Pobj) {
            None => info(PartialKind::Particle, Some("the")),
            Some(o) if p.is_det_only(o, cfg) => info(PartialKind::Target, None),
            Some(_) => PartialInfo::none(),
        };
    }
    match (class, dobj) {
        (VerbClass::Click, Some(d)) if p.is_det_only(d, cfg) => info(PartialKind::Target, None),
        (VerbClass::Type, Some(d)) if !p.is_det_only(d, cfg) => info(PartialKind::Particle, Some("in the")),
        _ => PartialInfo::none(),
    }
}
