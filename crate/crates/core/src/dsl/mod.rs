//! The shape description language.
//!
//! A description is a line-oriented text file:
//!
//! ```text
//! name: Ten
//! components:
//! Line horzLine
//! Line vertLine
//! constraints:
//! Horizontal horzLine
//! SameX horzLine.center vertLine.center
//! aliases:
//! Point leftPoint horzLine.p1
//! Line stroke1 horzLine
//! ```
//!
//! Tokens are whitespace separated, `#` starts a comment, and the three
//! sections must appear in the order shown. `Line` is the only built-in
//! component type; any other type names another description in the library.

mod library;
mod parser;
mod plan_check;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use library::{load_library, FlatArg, FlatConstraint, FlatLine, FlatShape, LibraryError, ShapeLibrary, Target};
pub use parser::{parse_description, ParseError, ParseErrorKind};
pub use plan_check::{validate_technique_plan, PlanWarning};

pub const LINE_TYPE: &str = "Line";

/// A dotted reference such as `horzLine.p1` or `ten.bottomPoint`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RefPath {
    pub segments: Vec<String>,
}

impl RefPath {
    pub fn parse(text: &str) -> Option<Self> {
        let segments: Vec<String> = text.split('.').map(str::to_string).collect();
        if segments.iter().all(|s| is_identifier(s)) {
            Some(RefPath { segments })
        } else {
            None
        }
    }

    pub fn head(&self) -> &str {
        &self.segments[0]
    }
}

impl fmt::Display for RefPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecl {
    pub type_name: String,
    pub instance_name: String,
}

impl ComponentDecl {
    pub fn is_line(&self) -> bool {
        self.type_name == LINE_TYPE
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDecl {
    pub predicate: String,
    pub args: Vec<RefPath>,
}

impl ConstraintDecl {
    /// Convenience constructor; panics on malformed paths.
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        ConstraintDecl {
            predicate: predicate.to_string(),
            args: args
                .iter()
                .map(|a| RefPath::parse(a).unwrap_or_else(|| panic!("bad reference `{a}`")))
                .collect(),
        }
    }
}

impl fmt::Display for ConstraintDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AliasKind {
    Line,
    Point,
}

impl AliasKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AliasKind::Line => "Line",
            AliasKind::Point => "Point",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasDecl {
    pub kind: AliasKind,
    pub name: String,
    pub target: RefPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeDescription {
    pub name: String,
    pub components: Vec<ComponentDecl>,
    pub constraints: Vec<ConstraintDecl>,
    pub aliases: Vec<AliasDecl>,
}

impl ShapeDescription {
    pub fn component(&self, instance: &str) -> Option<&ComponentDecl> {
        self.components.iter().find(|c| c.instance_name == instance)
    }

    /// The alias named `name`, provided exactly one alias carries it.
    pub fn unique_alias(&self, name: &str) -> Result<Option<&AliasDecl>, usize> {
        let mut found = self.aliases.iter().filter(|a| a.name == name);
        match (found.next(), found.count()) {
            (None, _) => Ok(None),
            (Some(a), 0) => Ok(Some(a)),
            (Some(_), n) => Err(n + 1),
        }
    }

    /// Names of other descriptions used as component types, in
    /// declaration order without repeats.
    pub fn dependencies(&self) -> Vec<&str> {
        let mut deps: Vec<&str> = Vec::new();
        for c in &self.components {
            if !c.is_line() && !deps.contains(&c.type_name.as_str()) {
                deps.push(&c.type_name);
            }
        }
        deps
    }

    /// Canonical text form; single spaces, every section header present.
    pub fn serialize(&self) -> String {
        let mut out = format!("name: {}\ncomponents:\n", self.name);
        for c in &self.components {
            out.push_str(&format!("{} {}\n", c.type_name, c.instance_name));
        }
        out.push_str("constraints:\n");
        for c in &self.constraints {
            out.push_str(&format!("{c}\n"));
        }
        out.push_str("aliases:\n");
        for a in &self.aliases {
            out.push_str(&format!("{} {} {}\n", a.kind.as_str(), a.name, a.target));
        }
        out
    }
}

pub fn serialize_description(d: &ShapeDescription) -> String {
    d.serialize()
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

/// Parses `stroke<k>` / `point<k>` alias names into their ordinal.
pub fn enumerated_ordinal(name: &str, prefix: &str) -> Option<u32> {
    let digits = name.strip_prefix(prefix)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn stroke_ordinal(name: &str) -> Option<u32> {
    enumerated_ordinal(name, "stroke")
}

pub fn point_ordinal(name: &str) -> Option<u32> {
    enumerated_ordinal(name, "point")
}
