use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("message catalog is not a JSON object of strings: {0}")]
    Json(#[from] serde_json::Error),
    #[error("message catalog lacks key `{0}`")]
    MissingKey(&'static str),
}

/// Keys every catalog must define.
pub const REQUIRED_KEYS: &[&str] = &[
    "response.correct",
    "response.techniqueErrors",
    "response.noMatch",
    "response.engineError",
    "critique.strokeCountMismatch",
    "critique.constraintMiss",
    "critique.noConsistentAssignment",
    "critique.invalidInk",
    "critique.order.outOfSequence",
    "critique.order.splitAcrossStrokes",
    "critique.order.subOrder",
    "critique.order.joinedStrokes",
    "critique.direction",
    "critique.element",
    "critique.strokeCount",
    "comment.correct",
    "comment.technique",
    "comment.noMatch",
    "comment.engineError",
    "comment.indeterminate",
];

const SHIPPED: &str = include_str!("../../../../data/messages.json");

/// Feedback templates keyed by failure kind, with `{name}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageCatalog {
    templates: BTreeMap<String, String>,
}

impl MessageCatalog {
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let templates: BTreeMap<String, String> = serde_json::from_str(text)?;
        for key in REQUIRED_KEYS {
            if !templates.contains_key(*key) {
                return Err(CatalogError::MissingKey(key));
            }
        }
        Ok(MessageCatalog { templates })
    }

    /// The catalog shipped with the library.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("shipped catalog is complete")
    }

    /// Fills `key`'s template. Unknown placeholders are left as written.
    pub fn render(&self, key: &str, args: &[(&str, String)]) -> String {
        let Some(template) = self.templates.get(key) else {
            return key.to_string();
        };
        let mut out = template.clone();
        for (name, value) in args {
            out = out.replace(&format!("{{{name}}}"), value);
        }
        out
    }
}

impl Default for MessageCatalog {
    fn default() -> Self {
        Self::shipped()
    }
}
