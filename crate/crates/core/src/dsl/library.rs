use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::{parse_description, AliasKind, ParseError, ShapeDescription, LINE_TYPE};
use crate::constraint::{ArgKind, LandmarkRole, Predicate};

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error("shape `{0}` is defined more than once")]
    DuplicateShape(String),
    #[error("shape `{shape}` uses undefined shape type `{missing}`")]
    MissingDependency { shape: String, missing: String },
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("shape `{shape}`: cannot resolve `{reference}`: {reason}")]
    Resolve {
        shape: String,
        reference: String,
        reason: String,
    },
    #[error("unknown shape `{0}`")]
    UnknownShape(String),
}

/// A fully resolved reference: a component line, or one of its landmarks.
/// Line paths are qualified from the root description, e.g. `ten.vertLine`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Line(Vec<String>),
    Point(Vec<String>, LandmarkRole),
}

impl Target {
    pub fn kind(&self) -> ArgKind {
        match self {
            Target::Line(_) => ArgKind::Line,
            Target::Point(..) => ArgKind::Point,
        }
    }

    pub fn line_path(&self) -> &[String] {
        match self {
            Target::Line(p) | Target::Point(p, _) => p,
        }
    }
}

pub(crate) enum Resolution {
    Resolved(Target),
    /// The path enters a sub-shape the caller could not look up.
    Deferred,
}

const MAX_ALIAS_DEPTH: usize = 64;

/// Resolves `segs` inside `desc`, whose components live under `prefix`.
/// Sub-shape descriptions come from `lookup`; a `None` there yields
/// `Deferred` rather than an error.
pub(crate) fn resolve_path<'a>(
    desc: &'a ShapeDescription,
    segs: &[String],
    prefix: &[String],
    lookup: &dyn Fn(&str) -> Option<&'a ShapeDescription>,
    depth: usize,
) -> Result<Resolution, String> {
    if depth > MAX_ALIAS_DEPTH {
        return Err("alias chain too deep (cycle?)".into());
    }
    let head = segs.first().ok_or("empty reference")?;
    let mut qualified = prefix.to_vec();
    qualified.push(head.clone());

    if let Some(comp) = desc.component(head) {
        if comp.type_name == LINE_TYPE {
            return match segs.len() {
                1 => Ok(Resolution::Resolved(Target::Line(qualified))),
                2 => LandmarkRole::parse(&segs[1])
                    .map(|r| Resolution::Resolved(Target::Point(qualified, r)))
                    .ok_or_else(|| format!("`{}` is not a landmark (p1, p2, center)", segs[1])),
                _ => Err(format!("too many segments after line `{head}`")),
            };
        }
        let Some(sub) = lookup(&comp.type_name) else {
            return Ok(Resolution::Deferred);
        };
        let exported = segs
            .get(1)
            .ok_or_else(|| format!("`{head}` is a `{}` shape, not a line or point", comp.type_name))?;
        let alias = match sub.unique_alias(exported) {
            Ok(Some(a)) => a,
            Ok(None) => return Err(format!("`{}` exports no alias `{exported}`", comp.type_name)),
            Err(n) => return Err(format!("`{}.{exported}` is ambiguous ({n} aliases)", comp.type_name)),
        };
        let mut inner = alias.target.segments.clone();
        inner.extend_from_slice(&segs[2..]);
        return resolve_path(sub, &inner, &qualified, lookup, depth + 1);
    }

    match desc.unique_alias(head) {
        Ok(Some(alias)) => {
            let mut inner = alias.target.segments.clone();
            inner.extend_from_slice(&segs[1..]);
            let res = resolve_path(desc, &inner, prefix, lookup, depth + 1)?;
            if segs.len() == 1 {
                if let Resolution::Resolved(t) = &res {
                    let expected = match alias.kind {
                        AliasKind::Line => ArgKind::Line,
                        AliasKind::Point => ArgKind::Point,
                    };
                    if t.kind() != expected {
                        return Err(format!("{} alias `{head}` resolves to a {}", alias.kind.as_str(), t.kind()));
                    }
                }
            }
            Ok(res)
        }
        Ok(None) => Err(format!("no component or alias named `{head}`")),
        Err(n) => Err(format!("`{head}` names {n} aliases and cannot be referenced")),
    }
}

/// One line of a flattened description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatLine {
    /// Qualified path such as `ten.horzLine`.
    pub path: String,
    /// Top-level sub-shape instance containing the line, if any.
    pub element: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatArg {
    Line(usize),
    Point(usize, LandmarkRole),
}

impl FlatArg {
    pub fn line(self) -> usize {
        match self {
            FlatArg::Line(i) | FlatArg::Point(i, _) => i,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatConstraint {
    pub predicate: Predicate,
    pub args: Vec<FlatArg>,
    /// Human-readable form with qualified argument paths, e.g.
    /// `SameX(horzLine.center, vertLine.center)`.
    pub text: String,
}

/// A description with every sub-shape expanded depth-first into one line
/// set and one constraint list.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatShape {
    pub name: String,
    pub lines: Vec<FlatLine>,
    pub constraints: Vec<FlatConstraint>,
    /// Top-level sub-shape instances in declaration order.
    pub elements: Vec<String>,
}

impl FlatShape {
    pub fn line_index(&self, path: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.path == path)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ShapeLibrary {
    pub descriptions: BTreeMap<String, ShapeDescription>,
    /// Names with dependencies first.
    pub topological_order: Vec<String>,
}

impl ShapeLibrary {
    pub fn from_descriptions(descs: Vec<ShapeDescription>) -> Result<Self, LibraryError> {
        let mut descriptions = BTreeMap::new();
        for d in descs {
            let name = d.name.clone();
            if descriptions.insert(name.clone(), d).is_some() {
                return Err(LibraryError::DuplicateShape(name));
            }
        }
        for d in descriptions.values() {
            for dep in d.dependencies() {
                if !descriptions.contains_key(dep) {
                    return Err(LibraryError::MissingDependency {
                        shape: d.name.clone(),
                        missing: dep.to_string(),
                    });
                }
            }
        }
        let topological_order = topo_order(&descriptions)?;
        let lib = ShapeLibrary {
            descriptions,
            topological_order,
        };
        lib.check_references()?;
        Ok(lib)
    }

    pub fn get(&self, name: &str) -> Option<&ShapeDescription> {
        self.descriptions.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.descriptions.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.descriptions.keys().map(String::as_str)
    }

    /// Resolves a reference written inside description `desc`.
    pub fn resolve(&self, desc: &ShapeDescription, segs: &[String], prefix: &[String]) -> Result<Target, String> {
        let lookup = |n: &str| self.descriptions.get(n);
        match resolve_path(desc, segs, prefix, &lookup, 0)? {
            Resolution::Resolved(t) => Ok(t),
            Resolution::Deferred => Err("refers to an unknown shape".into()),
        }
    }

    fn check_references(&self) -> Result<(), LibraryError> {
        for d in self.descriptions.values() {
            let fail = |reference: String, reason: String| LibraryError::Resolve {
                shape: d.name.clone(),
                reference,
                reason,
            };
            for c in &d.constraints {
                let pred = Predicate::from_name(&c.predicate).ok_or_else(|| {
                    fail(c.predicate.clone(), "unknown predicate".into())
                })?;
                for (arg, &kind) in c.args.iter().zip(pred.arg_kinds()) {
                    let t = self.resolve(d, &arg.segments, &[]).map_err(|r| fail(arg.to_string(), r))?;
                    if t.kind() != kind {
                        return Err(fail(arg.to_string(), format!("`{}` needs a {kind}", c.predicate)));
                    }
                }
            }
            for a in &d.aliases {
                let t = self.resolve(d, &a.target.segments, &[]).map_err(|r| fail(a.target.to_string(), r))?;
                let expected = match a.kind {
                    AliasKind::Line => ArgKind::Line,
                    AliasKind::Point => ArgKind::Point,
                };
                if t.kind() != expected {
                    return Err(fail(
                        a.target.to_string(),
                        format!("{} alias `{}` resolves to a {}", a.kind.as_str(), a.name, t.kind()),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Expands `name` into its flattened line set and constraints.
    pub fn flatten(&self, name: &str) -> Result<FlatShape, LibraryError> {
        let desc = self.get(name).ok_or_else(|| LibraryError::UnknownShape(name.to_string()))?;
        let mut lines = Vec::new();
        collect_lines(self, desc, &[], None, &mut lines);
        let index: HashMap<String, usize> = lines.iter().enumerate().map(|(i, l)| (l.path.clone(), i)).collect();
        let mut constraints = Vec::new();
        self.collect_constraints(desc, &[], &index, &mut constraints)?;
        let elements = desc
            .components
            .iter()
            .filter(|c| !c.is_line())
            .map(|c| c.instance_name.clone())
            .collect();
        Ok(FlatShape {
            name: name.to_string(),
            lines,
            constraints,
            elements,
        })
    }

    fn collect_constraints(
        &self,
        desc: &ShapeDescription,
        prefix: &[String],
        index: &HashMap<String, usize>,
        out: &mut Vec<FlatConstraint>,
    ) -> Result<(), LibraryError> {
        for comp in desc.components.iter().filter(|c| !c.is_line()) {
            let sub = self
                .get(&comp.type_name)
                .ok_or_else(|| LibraryError::UnknownShape(comp.type_name.clone()))?;
            let mut p = prefix.to_vec();
            p.push(comp.instance_name.clone());
            self.collect_constraints(sub, &p, index, out)?;
        }
        for c in &desc.constraints {
            let predicate = Predicate::from_name(&c.predicate).ok_or_else(|| LibraryError::Resolve {
                shape: desc.name.clone(),
                reference: c.predicate.clone(),
                reason: "unknown predicate".into(),
            })?;
            let mut args = Vec::with_capacity(c.args.len());
            let mut shown = Vec::with_capacity(c.args.len());
            for arg in &c.args {
                let t = self.resolve(desc, &arg.segments, prefix).map_err(|reason| LibraryError::Resolve {
                    shape: desc.name.clone(),
                    reference: arg.to_string(),
                    reason,
                })?;
                let line = index[&t.line_path().join(".")];
                args.push(match t {
                    Target::Line(_) => FlatArg::Line(line),
                    Target::Point(_, role) => FlatArg::Point(line, role),
                });
                let mut qualified = prefix.to_vec();
                qualified.extend(arg.segments.iter().cloned());
                shown.push(qualified.join("."));
            }
            out.push(FlatConstraint {
                predicate,
                args,
                text: format!("{}({})", c.predicate, shown.join(", ")),
            });
        }
        Ok(())
    }
}

fn collect_lines(
    lib: &ShapeLibrary,
    desc: &ShapeDescription,
    prefix: &[String],
    element: Option<&str>,
    out: &mut Vec<FlatLine>,
) {
    for comp in &desc.components {
        let mut path = prefix.to_vec();
        path.push(comp.instance_name.clone());
        if comp.is_line() {
            out.push(FlatLine {
                path: path.join("."),
                element: element.map(str::to_string),
            });
        } else if let Some(sub) = lib.get(&comp.type_name) {
            let elem = element.unwrap_or(&comp.instance_name);
            collect_lines(lib, sub, &path, Some(elem), out);
        }
    }
}

fn topo_order(descs: &BTreeMap<String, ShapeDescription>) -> Result<Vec<String>, LibraryError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        name: &str,
        descs: &BTreeMap<String, ShapeDescription>,
        marks: &mut HashMap<String, Mark>,
        stack: &mut Vec<String>,
        order: &mut Vec<String>,
    ) -> Result<(), LibraryError> {
        match marks.get(name).copied().unwrap_or(Mark::New) {
            Mark::Done => return Ok(()),
            Mark::Active => {
                let start = stack.iter().position(|s| s == name).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(name.to_string());
                return Err(LibraryError::Cycle(cycle));
            }
            Mark::New => {}
        }
        marks.insert(name.to_string(), Mark::Active);
        stack.push(name.to_string());
        for dep in descs[name].dependencies() {
            visit(dep, descs, marks, stack, order)?;
        }
        stack.pop();
        marks.insert(name.to_string(), Mark::Done);
        order.push(name.to_string());
        Ok(())
    }

    let mut marks = HashMap::new();
    let mut order = Vec::new();
    for name in descs.keys() {
        visit(name, descs, &mut marks, &mut Vec::new(), &mut order)?;
    }
    Ok(order)
}

/// Loads every `*.shape` file in `dir` (non-recursive) as one library.
pub fn load_library(dir: &Path) -> Result<ShapeLibrary, LibraryError> {
    let io = |path: &Path, source| LibraryError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "shape"))
        .collect();
    files.sort();
    let mut descs = Vec::with_capacity(files.len());
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| io(f, e))?;
        let d = parse_description(&text).map_err(|error| LibraryError::Parse {
            file: f.display().to_string(),
            error,
        })?;
        descs.push(d);
    }
    ShapeLibrary::from_descriptions(descs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEN: &str = "name: Ten
components:
Line horzLine
Line vertLine
constraints:
Horizontal horzLine
Vertical vertLine
LeftOf horzLine.p1 horzLine.p2
Above vertLine.p1 vertLine.p2
SameX horzLine.center vertLine.center
aliases:
Point leftPoint horzLine.p1
Point rightPoint horzLine.p2
Point bottomPoint vertLine.p2
";

    const MOUTH: &str = "name: Mouth
components:
Line leftLine
Line topLine
constraints:
Vertical leftLine
aliases:
Point topPoint topLine.center
Point leftPoint topLine.p1
Point rightPoint topLine.p2
";

    const ANCIENT: &str = "name: Ancient
components:
Ten ten
Mouth mouth
constraints:
SameX ten.bottomPoint mouth.topPoint
LeftOf ten.leftPoint mouth.leftPoint
RightOf ten.rightPoint mouth.rightPoint
aliases:
";

    fn lib(texts: &[&str]) -> Result<ShapeLibrary, LibraryError> {
        ShapeLibrary::from_descriptions(texts.iter().map(|t| parse_description(t).unwrap()).collect())
    }

    #[test]
    fn dependencies_come_first() {
        let l = lib(&[ANCIENT, MOUTH, TEN]).unwrap();
        let pos = |n: &str| l.topological_order.iter().position(|x| x == n).unwrap();
        assert!(pos("Ten") < pos("Ancient"));
        assert!(pos("Mouth") < pos("Ancient"));
        assert_eq!(l.topological_order.len(), 3);
    }

    #[test]
    fn cycle_is_reported_with_loop() {
        let a = "name: A\ncomponents:\nB b\n";
        let b = "name: B\ncomponents:\nA a\n";
        match lib(&[a, b]) {
            Err(LibraryError::Cycle(path)) => assert_eq!(path, ["A", "B", "A"]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn missing_dependency_named() {
        match lib(&[ANCIENT, TEN]) {
            Err(LibraryError::MissingDependency { shape, missing }) => {
                assert_eq!((shape.as_str(), missing.as_str()), ("Ancient", "Mouth"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_line_library() {
        let l = lib(&["name: One\ncomponents:\nLine bar\nconstraints:\nHorizontal bar\n"]).unwrap();
        assert_eq!(l.topological_order, ["One"]);
    }

    #[test]
    fn bad_sub_shape_alias_rejected() {
        let bad = "name: Bad\ncomponents:\nTen ten\nconstraints:\nSameX ten.vertLine.p1 ten.leftPoint\n";
        assert!(matches!(lib(&[TEN, bad]), Err(LibraryError::Resolve { .. })));
    }

    #[test]
    fn flatten_expands_depth_first() {
        let l = lib(&[ANCIENT, MOUTH, TEN]).unwrap();
        let flat = l.flatten("Ancient").unwrap();
        let paths: Vec<&str> = flat.lines.iter().map(|l| l.path.as_str()).collect();
        assert_eq!(paths, ["ten.horzLine", "ten.vertLine", "mouth.leftLine", "mouth.topLine"]);
        assert_eq!(flat.elements, ["ten", "mouth"]);
        let same_x = flat.constraints.iter().find(|c| c.text == "SameX(ten.bottomPoint, mouth.topPoint)").unwrap();
        assert_eq!(same_x.args, vec![FlatArg::Point(1, LandmarkRole::P2), FlatArg::Point(3, LandmarkRole::Center)]);
        // 5 from Ten, 1 from Mouth, 3 of its own
        assert_eq!(flat.constraints.len(), 9);
    }
}
