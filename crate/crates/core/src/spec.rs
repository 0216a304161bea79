//! App specification document: the declared screens, elements, actions and
//! failure triggers of an app, consumed by the model builder and simulator.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::gui_model::{ActionKind, GuiModelError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppSpec {
    pub app_id: String,
    pub initial_screen: String,
    pub screens: Vec<ScreenSpec>,
    #[serde(default)]
    pub failures: Vec<FailureSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<String>,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub id: String,
    pub etype: String,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub container: bool,
    #[serde(default)]
    pub actions: Vec<ActionSpec>,
    /// Initial children of a container element.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub a_type: ActionKind,
    /// Screen shown after the action; the element's own screen when absent.
    #[serde(default)]
    pub target_screen: Option<String>,
    /// Declared in the code but not reachable by runtime exploration.
    #[serde(default)]
    pub declared_only: bool,
    /// Adds an item to a container on the element's screen when executed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub appends: Option<AppendSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendSpec {
    pub container: String,
    pub element: ElementSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureSpec {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub trigger: Vec<TriggerStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerStep {
    pub screen: String,
    pub a_type: ActionKind,
    pub element: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
}

impl ScreenSpec {
    /// Elements in declaration order, container children after their parent.
    pub fn all_elements(&self) -> Vec<&ElementSpec> {
        fn walk<'a>(els: &'a [ElementSpec], out: &mut Vec<&'a ElementSpec>) {
            for e in els {
                out.push(e);
                walk(&e.children, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.elements, &mut out);
        out
    }

    pub fn element(&self, id: &str) -> Option<&ElementSpec> {
        self.all_elements().into_iter().find(|e| e.id == id)
    }
}

impl AppSpec {
    pub fn from_json(s: &str) -> Result<AppSpec, GuiModelError> {
        let spec: AppSpec =
            serde_json::from_str(s).map_err(|e| GuiModelError::Malformed(e.to_string()))?;
        Ok(spec)
    }

    pub fn screen(&self, name: &str) -> Option<&ScreenSpec> {
        self.screens.iter().find(|s| s.name == name)
    }

    /// Referential checks: unique screen names, declared initial screen,
    /// declared transition targets, non-empty failure triggers.
    pub fn validate(&self) -> Result<(), GuiModelError> {
        let mut names = HashSet::new();
        for s in &self.screens {
            if s.name.is_empty() || s.name.contains(['.', ' ', '\t']) {
                return Err(GuiModelError::Malformed(format!(
                    "invalid screen name `{}`",
                    s.name
                )));
            }
            if !names.insert(s.name.as_str()) {
                return Err(GuiModelError::DuplicateScreen(s.name.clone()));
            }
        }
        if !names.contains(self.initial_screen.as_str()) {
            return Err(GuiModelError::MissingInitial(self.initial_screen.clone()));
        }
        for s in &self.screens {
            for el in s.all_elements() {
                if el.id.contains(char::is_whitespace) || el.etype.contains(['.', ' ']) {
                    return Err(GuiModelError::Malformed(format!(
                        "element `{}` on `{}` has an invalid id or type",
                        el.id, s.name
                    )));
                }
                for a in &el.actions {
                    if a.a_type == ActionKind::Dummy {
                        return Err(GuiModelError::Malformed(format!(
                            "element `{}` declares a DUMMY action",
                            el.id
                        )));
                    }
                    if let Some(t) = &a.target_screen {
                        if !names.contains(t.as_str()) {
                            return Err(GuiModelError::UndeclaredTarget {
                                screen: s.name.clone(),
                                element: el.id.clone(),
                                target: t.clone(),
                            });
                        }
                    }
                }
            }
        }
        for f in &self.failures {
            if f.trigger.is_empty() {
                return Err(GuiModelError::Malformed(format!(
                    "failure `{}` has an empty trigger",
                    f.id
                )));
            }
        }
        Ok(())
    }
}
