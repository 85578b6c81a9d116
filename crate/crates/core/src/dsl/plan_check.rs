use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{ShapeDescription, ShapeLibrary};
use crate::constraint::LandmarkRole;
use crate::critic::build_plan;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanWarning {
    /// Lines with no `stroke<k>` alias.
    UncoveredLines { lines: Vec<String> },
    PointsAbsent,
    /// Endpoints missing from the `point<k>` enumeration.
    PointsPartial { missing: Vec<String> },
    /// No ordering constraint touches this line's endpoints, so its
    /// drawing direction cannot be judged.
    RoleUnpinned { line: String },
    PlanError { message: String },
}

impl fmt::Display for PlanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanWarning::UncoveredLines { lines } => write!(f, "lines without a stroke alias: {}", lines.join(", ")),
            PlanWarning::PointsAbsent => f.write_str("no point<k> enumeration; direction cannot be checked"),
            PlanWarning::PointsPartial { missing } => {
                write!(f, "endpoints missing from point enumeration: {}", missing.join(", "))
            }
            PlanWarning::RoleUnpinned { line } => {
                write!(f, "constraints do not fix which end of `{line}` is p1")
            }
            PlanWarning::PlanError { message } => write!(f, "technique plan error: {message}"),
        }
    }
}

/// Reports gaps in a description's technique annotations. Never fails.
pub fn validate_technique_plan(d: &ShapeDescription, lib: &ShapeLibrary) -> Vec<PlanWarning> {
    let mut warnings = Vec::new();
    let flat = match lib.flatten(&d.name) {
        Ok(f) => f,
        Err(e) => {
            warnings.push(PlanWarning::PlanError { message: e.to_string() });
            return warnings;
        }
    };

    match build_plan(d, lib) {
        Ok(plan) => {
            let covered: BTreeSet<&str> = plan.strokes.iter().flat_map(|s| s.lines.iter().map(String::as_str)).collect();
            let uncovered: Vec<String> = flat
                .lines
                .iter()
                .filter(|l| !covered.contains(l.path.as_str()))
                .map(|l| l.path.clone())
                .collect();
            if !uncovered.is_empty() {
                warnings.push(PlanWarning::UncoveredLines { lines: uncovered });
            }
            if plan.points.is_empty() {
                warnings.push(PlanWarning::PointsAbsent);
            } else {
                let listed: BTreeSet<(&str, LandmarkRole)> =
                    plan.points.iter().map(|p| (p.line.as_str(), p.role)).collect();
                let missing: Vec<String> = flat
                    .lines
                    .iter()
                    .flat_map(|l| [(l, LandmarkRole::P1), (l, LandmarkRole::P2)])
                    .filter(|(l, r)| !listed.contains(&(l.path.as_str(), *r)))
                    .map(|(l, r)| format!("{}.{}", l.path, r))
                    .collect();
                if !missing.is_empty() {
                    warnings.push(PlanWarning::PointsPartial { missing });
                }
            }
        }
        Err(e) => warnings.push(PlanWarning::PlanError { message: e.to_string() }),
    }

    let mut pinned = vec![false; flat.lines.len()];
    for c in flat.constraints.iter().filter(|c| c.predicate.orders_points()) {
        for arg in &c.args {
            if let crate::dsl::FlatArg::Point(line, LandmarkRole::P1 | LandmarkRole::P2) = *arg {
                pinned[line] = true;
            }
        }
    }
    for (line, ok) in flat.lines.iter().zip(pinned) {
        if !ok {
            warnings.push(PlanWarning::RoleUnpinned { line: line.path.clone() });
        }
    }
    warnings
}
