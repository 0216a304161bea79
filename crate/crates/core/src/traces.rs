//! User traces: the tab-separated capture format, GAT/GET token encodings,
//! and trace-driven refinement of a GUI model.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gui_model::{ActionKind, GuiModel, Provenance, ROTATE_ETYPE, ROTATE_ID};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceTuple {
    pub s_name: String,
    pub a_type: ActionKind,
    pub e_type: String,
    pub e_id: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: malformed trace record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unknown action `{action}`")]
    UnknownAction { line: usize, action: String },
    #[error("malformed token `{0}`")]
    BadToken(String),
}

impl TraceTuple {
    pub fn new(s_name: &str, a_type: ActionKind, e_type: &str, e_id: &str) -> Self {
        TraceTuple {
            s_name: s_name.to_string(),
            a_type,
            e_type: e_type.to_string(),
            e_id: e_id.to_string(),
        }
    }

    pub fn rotation(s_name: &str) -> Self {
        TraceTuple::new(s_name, ActionKind::Rotate, ROTATE_ETYPE, ROTATE_ID)
    }

    /// `s_name.a_type.e_type.e_id`
    pub fn to_gat_token(&self) -> String {
        format!("{}.{}.{}.{}", self.s_name, self.a_type, self.e_type, self.e_id)
    }

    /// Inverse of [`TraceTuple::to_gat_token`]. The element id may itself
    /// contain dots; screen names and element types may not.
    pub fn from_gat_token(token: &str) -> Result<TraceTuple, TraceError> {
        let bad = || TraceError::BadToken(token.to_string());
        let mut parts = token.splitn(4, '.');
        let s = parts.next().filter(|s| !s.is_empty()).ok_or_else(bad)?;
        let a = parts.next().and_then(ActionKind::parse).ok_or_else(bad)?;
        let t = parts.next().filter(|s| !s.is_empty()).ok_or_else(bad)?;
        let e = parts.next().ok_or_else(bad)?;
        Ok(TraceTuple::new(s, a, t, e))
    }

    /// `s_name.a_type`
    pub fn action_token(&self) -> String {
        format!("{}.{}", self.s_name, self.a_type)
    }

    /// `s_name.e_type.e_id`
    pub fn element_token(&self) -> String {
        format!("{}.{}.{}", self.s_name, self.e_type, self.e_id)
    }
}

impl fmt::Display for TraceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.s_name, self.a_type, self.e_type, self.e_id)
    }
}

/// Splits an element token `s_name.e_type.e_id` into its three fields.
pub fn split_element_token(token: &str) -> Option<(&str, &str, &str)> {
    let mut parts = token.splitn(3, '.');
    let s = parts.next().filter(|s| !s.is_empty())?;
    let t = parts.next().filter(|s| !s.is_empty())?;
    let e = parts.next()?;
    Some((s, t, e))
}

/// Splits an action token `s_name.a_type`.
pub fn split_action_token(token: &str) -> Option<(&str, ActionKind)> {
    let (s, a) = token.split_once('.')?;
    if s.is_empty() {
        return None;
    }
    Some((s, ActionKind::parse(a)?))
}

/// Parses a trace file. Blank lines and lines starting with `#` are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<TraceTuple>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r');
        if l.trim().is_empty() || l.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != 4 {
            return Err(TraceError::Malformed {
                line,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let a_type = ActionKind::parse(fields[1])
            .filter(|a| *a != ActionKind::Dummy)
            .ok_or_else(|| TraceError::UnknownAction {
                line,
                action: fields[1].to_string(),
            })?;
        if fields[0].is_empty() || fields[0].contains('.') || fields[2].is_empty() || fields[2].contains('.') {
            return Err(TraceError::Malformed {
                line,
                reason: "screen and element type must be non-empty and dot-free".into(),
            });
        }
        if fields[3].is_empty() && a_type != ActionKind::Rotate {
            return Err(TraceError::Malformed {
                line,
                reason: "empty element id".into(),
            });
        }
        out.push(TraceTuple::new(fields[0], a_type, fields[2], fields[3]));
    }
    Ok(out)
}

pub fn serialize_trace(trace: &[TraceTuple]) -> String {
    let mut s = String::new();
    for t in trace {
        s.push_str(&t.to_string());
        s.push('\n');
    }
    s
}

pub fn to_gat(trace: &[TraceTuple]) -> Vec<String> {
    trace.iter().map(TraceTuple::to_gat_token).collect()
}

pub fn to_get(trace: &[TraceTuple]) -> Vec<String> {
    trace
        .iter()
        .flat_map(|t| [t.action_token(), t.element_token()])
        .collect()
}

/// Adds the screens, elements and transitions exercised by the traces.
/// Successive tuples add an edge from the first tuple's element to the second
/// tuple's screen unless an edge with that action already exists; a
/// same-screen step on an element that only has a dummy edge counts as
/// already covered.
pub fn refine_model(gm: &GuiModel, traces: &[Vec<TraceTuple>]) -> GuiModel {
    let mut out = gm.clone();
    for trace in traces {
        let mut prev = None;
        for t in trace {
            let sid = out.add_screen(&t.s_name, None, Provenance::Trace);
            let eid = match out.find_element(sid, &t.e_id, &t.e_type) {
                Some(e) => e,
                None => out.add_element(sid, &t.e_id, &t.e_type, "", None),
            };
            if let Some((p_eid, p_screen, p_action)) = prev.take() {
                let covered = out
                    .outgoing(p_eid)
                    .any(|tr| tr.target == sid && (tr.a_type == p_action || (tr.a_type == ActionKind::Dummy && p_screen == sid)));
                if !covered {
                    out.add_transition(p_eid, sid, p_action, Provenance::Trace);
                }
            }
            prev = Some((eid, sid, t.a_type));
        }
    }
    out
}
