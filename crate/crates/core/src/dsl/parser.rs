use std::collections::HashSet;

use thiserror::Error;

use super::library::{resolve_path, Resolution};
use super::{
    is_identifier, stroke_ordinal, AliasDecl, AliasKind, ComponentDecl, ConstraintDecl, RefPath, ShapeDescription,
    LINE_TYPE,
};
use crate::constraint::{ArgKind, Predicate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected `name: <Identifier>` header")]
    MissingName,
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("section `{0}` is out of order (expected components, constraints, aliases)")]
    SectionOrder(String),
    #[error("{0}")]
    Syntax(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{predicate}` takes {expected} argument(s), found {found}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("argument `{reference}` of `{predicate}` must be a {expected}")]
    ArgKind {
        predicate: String,
        reference: String,
        expected: ArgKind,
    },
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("cannot resolve `{reference}`: {reason}")]
    Unresolved { reference: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Components,
    Constraints,
    Aliases,
}

impl Section {
    fn from_header(s: &str) -> Option<Self> {
        match s {
            "components" => Some(Section::Components),
            "constraints" => Some(Section::Constraints),
            "aliases" => Some(Section::Aliases),
            _ => None,
        }
    }
}

/// Parses one description and validates everything that can be checked
/// without the rest of the library. References into sub-shapes are
/// checked later by the library loader.
pub fn parse_description(text: &str) -> Result<ShapeDescription, ParseError> {
    let mut name: Option<String> = None;
    let mut section: Option<Section> = None;
    let mut components = Vec::new();
    let mut constraints = Vec::new();
    let mut aliases = Vec::new();
    let mut constraint_lines = Vec::new();
    let mut alias_lines = Vec::new();
    let mut names: HashSet<String> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();

        if name.is_none() {
            let rest = content.strip_prefix("name:").ok_or_else(|| err(line_no, ParseErrorKind::MissingName))?;
            let ident = rest.trim();
            if !is_identifier(ident) {
                return Err(err(line_no, ParseErrorKind::MissingName));
            }
            name = Some(ident.to_string());
            continue;
        }

        if tokens.len() == 1 && content.ends_with(':') {
            let header = &content[..content.len() - 1];
            let next = Section::from_header(header)
                .ok_or_else(|| err(line_no, ParseErrorKind::UnknownSection(header.to_string())))?;
            if section.is_some_and(|s| s >= next) {
                return Err(err(line_no, ParseErrorKind::SectionOrder(header.to_string())));
            }
            section = Some(next);
            continue;
        }
        if tokens[0].ends_with(':') {
            let header = tokens[0].trim_end_matches(':');
            return Err(err(line_no, ParseErrorKind::UnknownSection(header.to_string())));
        }

        let parse_ref = |t: &str| {
            RefPath::parse(t).ok_or_else(|| err(line_no, ParseErrorKind::Syntax(format!("malformed reference `{t}`"))))
        };

        match section {
            None => {
                return Err(err(
                    line_no,
                    ParseErrorKind::Syntax("declaration outside of any section".into()),
                ))
            }
            Some(Section::Components) => {
                if tokens.len() != 2 {
                    return Err(err(
                        line_no,
                        ParseErrorKind::Syntax("component needs `<Type> <name>`".into()),
                    ));
                }
                let (ty, inst) = (tokens[0], tokens[1]);
                if !is_identifier(ty) || !is_identifier(inst) {
                    return Err(err(line_no, ParseErrorKind::Syntax("component names must be identifiers".into())));
                }
                if ty == inst {
                    return Err(err(
                        line_no,
                        ParseErrorKind::Syntax(format!("instance name `{inst}` equals its type")),
                    ));
                }
                if !names.insert(inst.to_string()) {
                    return Err(err(line_no, ParseErrorKind::Duplicate(inst.to_string())));
                }
                components.push(ComponentDecl {
                    type_name: ty.to_string(),
                    instance_name: inst.to_string(),
                });
            }
            Some(Section::Constraints) => {
                let pred_name = tokens[0];
                let pred = Predicate::from_name(pred_name)
                    .ok_or_else(|| err(line_no, ParseErrorKind::UnknownPredicate(pred_name.to_string())))?;
                let args = tokens[1..].iter().map(|t| parse_ref(t)).collect::<Result<Vec<_>, _>>()?;
                if args.len() != pred.arity() {
                    return Err(err(
                        line_no,
                        ParseErrorKind::Arity {
                            predicate: pred_name.to_string(),
                            expected: pred.arity(),
                            found: args.len(),
                        },
                    ));
                }
                constraints.push(ConstraintDecl {
                    predicate: pred_name.to_string(),
                    args,
                });
                constraint_lines.push(line_no);
            }
            Some(Section::Aliases) => {
                if tokens.len() != 3 {
                    return Err(err(
                        line_no,
                        ParseErrorKind::Syntax("alias needs `Line|Point <name> <target>`".into()),
                    ));
                }
                let kind = match tokens[0] {
                    "Line" => AliasKind::Line,
                    "Point" => AliasKind::Point,
                    other => {
                        return Err(err(
                            line_no,
                            ParseErrorKind::Syntax(format!("alias kind must be Line or Point, found `{other}`")),
                        ))
                    }
                };
                let alias_name = tokens[1];
                if !is_identifier(alias_name) {
                    return Err(err(line_no, ParseErrorKind::Syntax("alias name must be an identifier".into())));
                }
                // Multi-primitive pen strokes repeat their `stroke<k>` label.
                let repeatable = kind == AliasKind::Line && stroke_ordinal(alias_name).is_some();
                let fresh = names.insert(alias_name.to_string());
                let repeat_ok = repeatable
                    && aliases
                        .iter()
                        .any(|a: &AliasDecl| a.name == alias_name && a.kind == AliasKind::Line);
                if !fresh && !repeat_ok {
                    return Err(err(line_no, ParseErrorKind::Duplicate(alias_name.to_string())));
                }
                aliases.push(AliasDecl {
                    kind,
                    name: alias_name.to_string(),
                    target: parse_ref(tokens[2])?,
                });
                alias_lines.push(line_no);
            }
        }
    }

    let name = name.ok_or_else(|| err(text.lines().count().max(1), ParseErrorKind::MissingName))?;
    let desc = ShapeDescription {
        name,
        components,
        constraints,
        aliases,
    };

    for (alias, &line_no) in desc.aliases.iter().zip(&alias_lines) {
        if let Some(kind) = local_kind(&desc, &alias.target, line_no)? {
            let expected = match alias.kind {
                AliasKind::Line => ArgKind::Line,
                AliasKind::Point => ArgKind::Point,
            };
            if kind != expected {
                return Err(err(
                    line_no,
                    ParseErrorKind::Unresolved {
                        reference: alias.target.to_string(),
                        reason: format!("{} alias `{}` targets a {kind}", alias.kind.as_str(), alias.name),
                    },
                ));
            }
        }
    }
    for (c, &line_no) in desc.constraints.iter().zip(&constraint_lines) {
        let pred = Predicate::from_name(&c.predicate).expect("checked above");
        for (arg, &expected) in c.args.iter().zip(pred.arg_kinds()) {
            if let Some(kind) = local_kind(&desc, arg, line_no)? {
                if kind != expected {
                    return Err(err(
                        line_no,
                        ParseErrorKind::ArgKind {
                            predicate: c.predicate.clone(),
                            reference: arg.to_string(),
                            expected,
                        },
                    ));
                }
            }
        }
    }
    Ok(desc)
}

/// Resolves `path` within `desc` alone; `None` when the answer depends on a
/// sub-shape not available here.
fn local_kind(desc: &ShapeDescription, path: &RefPath, line_no: usize) -> Result<Option<ArgKind>, ParseError> {
    match resolve_path(desc, &path.segments, &[], &|_| None, 0) {
        Ok(Resolution::Resolved(t)) => Ok(Some(t.kind())),
        Ok(Resolution::Deferred) => Ok(None),
        Err(reason) => Err(err(
            line_no,
            ParseErrorKind::Unresolved {
                reference: path.to_string(),
                reason,
            },
        )),
    }
}

#[allow(dead_code)]
fn is_builtin(ty: &str) -> bool {
    ty == LINE_TYPE
}
