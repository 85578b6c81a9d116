//! Written-technique judgement on top of a visual match.
//!
//! The plan comes from `stroke<k>` / `point<k>` aliases. Every enumerated
//! label must carry an ascending drawing timestamp under the binding.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::LandmarkRole;
use crate::dsl::{point_ordinal, stroke_ordinal, AliasKind, ShapeDescription, ShapeLibrary, Target};
use crate::geometry::Point2;
use crate::ink::Sketch;
use crate::recognizer::{Binding, LineAssignment, Orientation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("unknown shape `{0}`")]
    UnknownShape(String),
    #[error("alias `{alias}`: {reason}")]
    Resolve { alias: String, reason: String },
    #[error("{kind} ordinals must be dense from 1; missing {kind}{ordinal}")]
    Gap { kind: &'static str, ordinal: u32 },
    #[error("point{0} is declared more than once")]
    DuplicatePoint(u32),
    #[error("point{0} must name an endpoint (p1 or p2), not a center")]
    CenterPoint(u32),
    #[error("{0} is listed under more than one stroke ordinal")]
    LineInTwoStrokes(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CritiqueError {
    #[error("plan and binding disagree: {0}")]
    PlanMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrokeEntry {
    pub ordinal: u32,
    /// Flattened line paths in within-stroke sub-order.
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointEntry {
    pub ordinal: u32,
    pub line: String,
    pub role: LandmarkRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TechniquePlan {
    pub strokes: Vec<StrokeEntry>,
    pub points: Vec<PointEntry>,
    pub elements: Vec<String>,
}

impl TechniquePlan {
    pub fn stroke_of_line(&self, line: &str) -> Option<u32> {
        self.strokes.iter().find(|s| s.lines.iter().any(|l| l == line)).map(|s| s.ordinal)
    }

    fn offset(mut self, prefix: &str, strokes: u32, points: u32) -> Self {
        for s in &mut self.strokes {
            s.ordinal += strokes;
            for l in &mut s.lines {
                *l = format!("{prefix}.{l}");
            }
        }
        for p in &mut self.points {
            p.ordinal += points;
            p.line = format!("{prefix}.{}", p.line);
        }
        self.elements = self.elements.into_iter().map(|e| format!("{prefix}.{e}")).collect();
        self
    }
}

/// Extracts the technique plan of `d`. A compound description without
/// enumerations of its own inherits its elements' plans in declaration
/// order, with ordinals offset by the strokes and points before them.
pub fn build_plan(d: &ShapeDescription, lib: &ShapeLibrary) -> Result<TechniquePlan, PlanError> {
    let mut stroke_map: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut point_map: BTreeMap<u32, (String, LandmarkRole)> = BTreeMap::new();
    for a in &d.aliases {
        let ordinal = match a.kind {
            AliasKind::Line => stroke_ordinal(&a.name),
            AliasKind::Point => point_ordinal(&a.name),
        };
        let Some(k) = ordinal else { continue };
        let target = lib.resolve(d, &a.target.segments, &[]).map_err(|reason| PlanError::Resolve {
            alias: a.name.clone(),
            reason,
        })?;
        match (a.kind, target) {
            (AliasKind::Line, Target::Line(path)) => stroke_map.entry(k).or_default().push(path.join(".")),
            (AliasKind::Point, Target::Point(path, role)) => {
                if role == LandmarkRole::Center {
                    return Err(PlanError::CenterPoint(k));
                }
                if point_map.insert(k, (path.join("."), role)).is_some() {
                    return Err(PlanError::DuplicatePoint(k));
                }
            }
            (kind, _) => {
                return Err(PlanError::Resolve {
                    alias: a.name.clone(),
                    reason: format!("{} alias resolves to the wrong kind", kind.as_str()),
                })
            }
        }
    }

    let elements: Vec<String> = d.components.iter().filter(|c| !c.is_line()).map(|c| c.instance_name.clone()).collect();

    if stroke_map.is_empty() && point_map.is_empty() {
        let mut plan = TechniquePlan::default();
        for c in d.components.iter().filter(|c| !c.is_line()) {
            let sub = lib.get(&c.type_name).ok_or_else(|| PlanError::UnknownShape(c.type_name.clone()))?;
            let sub_plan = build_plan(sub, lib)?.offset(&c.instance_name, plan.strokes.len() as u32, plan.points.len() as u32);
            plan.strokes.extend(sub_plan.strokes);
            plan.points.extend(sub_plan.points);
        }
        plan.elements = elements;
        return Ok(plan);
    }

    check_dense("stroke", stroke_map.keys())?;
    check_dense("point", point_map.keys())?;
    let mut seen = BTreeSet::new();
    for lines in stroke_map.values() {
        for l in lines {
            if !seen.insert(l.clone()) {
                return Err(PlanError::LineInTwoStrokes(l.clone()));
            }
        }
    }
    Ok(TechniquePlan {
        strokes: stroke_map.into_iter().map(|(ordinal, lines)| StrokeEntry { ordinal, lines }).collect(),
        points: point_map
            .into_iter()
            .map(|(ordinal, (line, role))| PointEntry { ordinal, line, role })
            .collect(),
        elements,
    })
}

fn check_dense<'a>(kind: &'static str, keys: impl Iterator<Item = &'a u32>) -> Result<(), PlanError> {
    for (expected, &k) in (1u32..).zip(keys) {
        if k != expected {
            return Err(PlanError::Gap { kind, ordinal: expected });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OrderViolationKind {
    /// Stroke k was not the k-th stroke started.
    OutOfSequence,
    /// Lines of one stroke came from different pen strokes.
    SplitAcrossStrokes,
    /// Lines of one bent stroke were drawn in the wrong sub-order.
    SubOrder,
    /// Stroke k was drawn in the same pen stroke as an earlier one.
    JoinedStrokes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderViolation {
    pub ordinal: u32,
    /// 1-based rank of this stroke among drawn start times.
    pub drawn_position: usize,
    pub kind: OrderViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionViolation {
    pub ordinal: u32,
    /// The landmark that should have been drawn first, e.g. `horzLine.p1`.
    pub expected_first: String,
    pub observed_first: String,
    pub expected_direction: String,
    pub observed_direction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementViolation {
    pub element: String,
    /// The element that should have been finished first.
    pub preceding: String,
    /// Timestamps in `element` earlier than the end of `preceding`.
    pub offending_timestamps: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TechniqueReport {
    pub stroke_count_ok: bool,
    pub expected_strokes: usize,
    pub drawn_strokes: usize,
    pub order_violations: Vec<OrderViolation>,
    pub direction_violations: Vec<DirectionViolation>,
    pub indeterminate_directions: Vec<u32>,
    pub element_violations: Vec<ElementViolation>,
    pub overall_pass: bool,
}

/// Total order on drawn instants: time, then stroke, sub-index, and
/// which end of the primitive.
type InstantKey = (u64, usize, usize, u8);

fn endpoint_key(asg: &LineAssignment, role: LandmarkRole) -> InstantKey {
    let p = &asg.primitive;
    let a_end = matches!(
        (role, asg.orientation),
        (LandmarkRole::P1, Orientation::AIsP1) | (LandmarkRole::P2, Orientation::BIsP1)
    );
    if a_end {
        (p.t_a, p.stroke_id, p.sub_index, 0)
    } else {
        (p.t_b, p.stroke_id, p.sub_index, 1)
    }
}

fn start_key(asg: &LineAssignment) -> InstantKey {
    let p = &asg.primitive;
    (p.t_a, p.stroke_id, p.sub_index, 0)
}

/// Coarse compass wording for the direction from `from` to `to`.
pub fn direction_word(from: Point2, to: Point2) -> String {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    let h = if dx >= 0.0 { ("left", "right") } else { ("right", "left") };
    let v = if dy >= 0.0 { ("top", "bottom") } else { ("bottom", "top") };
    if dx.abs() > 2.0 * dy.abs() {
        format!("{}-to-{}", h.0, h.1)
    } else if dy.abs() > 2.0 * dx.abs() {
        format!("{}-to-{}", v.0, v.1)
    } else {
        format!("{}-{}-to-{}-{}", v.0, h.0, v.1, h.1)
    }
}

/// Applies the ascending-timestamp rule of `plan` to a matched binding.
pub fn critique(binding: &Binding, plan: &TechniquePlan, sketch: &Sketch) -> Result<TechniqueReport, CritiqueError> {
    let lookup = |path: &str| {
        binding
            .get(path)
            .ok_or_else(|| CritiqueError::PlanMismatch(format!("`{path}` is not bound")))
    };

    // (1) order
    let mut order_violations = Vec::new();
    let mut starts: Vec<(InstantKey, u32)> = Vec::new();
    for s in &plan.strokes {
        let asg: Vec<&LineAssignment> = s.lines.iter().map(|l| lookup(l)).collect::<Result<_, _>>()?;
        let first = asg.iter().map(|a| start_key(a)).min().ok_or_else(|| {
            CritiqueError::PlanMismatch(format!("stroke{} has no lines", s.ordinal))
        })?;
        starts.push((first, s.ordinal));
    }
    starts.sort();
    let rank: BTreeMap<u32, usize> = starts.iter().enumerate().map(|(i, &(_, k))| (k, i + 1)).collect();
    let mut pen_stroke_owner: BTreeMap<usize, u32> = BTreeMap::new();
    for s in &plan.strokes {
        let asg: Vec<&LineAssignment> = s.lines.iter().map(|l| lookup(l)).collect::<Result<_, _>>()?;
        let position = rank[&s.ordinal];
        let strokes: BTreeSet<usize> = asg.iter().map(|a| a.primitive.stroke_id).collect();
        let kind = if strokes.len() > 1 {
            Some(OrderViolationKind::SplitAcrossStrokes)
        } else if position != s.ordinal as usize {
            Some(OrderViolationKind::OutOfSequence)
        } else if asg.windows(2).any(|w| w[0].primitive.sub_index > w[1].primitive.sub_index) {
            Some(OrderViolationKind::SubOrder)
        } else {
            None
        };
        let joined = strokes.iter().any(|sid| pen_stroke_owner.contains_key(sid));
        for &sid in &strokes {
            pen_stroke_owner.entry(sid).or_insert(s.ordinal);
        }
        let kind = kind.or(joined.then_some(OrderViolationKind::JoinedStrokes));
        if let Some(kind) = kind {
            order_violations.push(OrderViolation {
                ordinal: s.ordinal,
                drawn_position: position,
                kind,
            });
        }
    }

    // (2) direction via the point sequence
    let mut indeterminate = BTreeSet::new();
    let mut sequence: Vec<(InstantKey, u32, &PointEntry)> = Vec::new();
    for p in &plan.points {
        let asg = lookup(&p.line)?;
        let ordinal = plan
            .stroke_of_line(&p.line)
            .ok_or_else(|| CritiqueError::PlanMismatch(format!("point{} names `{}`, which has no stroke", p.ordinal, p.line)))?;
        if !asg.role_pinned {
            indeterminate.insert(ordinal);
            continue;
        }
        sequence.push((endpoint_key(asg, p.role), ordinal, p));
    }
    let mut reversed = BTreeSet::new();
    let mut late_order = BTreeSet::new();
    for w in sequence.windows(2) {
        if w[1].0 >= w[0].0 {
            continue;
        }
        if w[0].1 == w[1].1 {
            reversed.insert(w[0].1);
        } else {
            late_order.insert(w[1].1);
        }
    }
    for k in late_order {
        if !order_violations.iter().any(|v| v.ordinal == k) {
            order_violations.push(OrderViolation {
                ordinal: k,
                drawn_position: rank.get(&k).copied().unwrap_or(0),
                kind: OrderViolationKind::OutOfSequence,
            });
        }
    }
    order_violations.sort_by_key(|v| v.ordinal);

    let mut direction_violations = Vec::new();
    for k in reversed {
        let pts: Vec<&(InstantKey, u32, &PointEntry)> = sequence.iter().filter(|e| e.1 == k).collect();
        let (Some(first), Some(last)) = (pts.first(), pts.last()) else { continue };
        let earliest = pts.iter().min_by_key(|e| e.0).expect("non-empty");
        let latest = pts.iter().max_by_key(|e| e.0).expect("non-empty");
        let pos = |e: &(InstantKey, u32, &PointEntry)| -> Result<Point2, CritiqueError> {
            Ok(lookup(&e.2.line)?.line().landmark(e.2.role).position)
        };
        direction_violations.push(DirectionViolation {
            ordinal: k,
            expected_first: format!("{}.{}", first.2.line, first.2.role),
            observed_first: format!("{}.{}", earliest.2.line, earliest.2.role),
            expected_direction: direction_word(pos(first)?, pos(last)?),
            observed_direction: direction_word(pos(earliest)?, pos(latest)?),
        });
    }

    // (4) element sequence
    let mut element_violations = Vec::new();
    let element_times = |e: &str| -> Vec<u64> {
        let prefix = format!("{e}.");
        let mut ts: Vec<u64> = binding
            .lines
            .iter()
            .filter(|l| l.path.starts_with(&prefix))
            .flat_map(|l| [l.primitive.t_a, l.primitive.t_b])
            .collect();
        ts.sort_unstable();
        ts
    };
    for w in plan.elements.windows(2) {
        let before = element_times(&w[0]);
        let after = element_times(&w[1]);
        let (Some(&end), Some(_)) = (before.last(), after.first()) else { continue };
        let offending: Vec<u64> = after.into_iter().filter(|&t| t < end).collect();
        if !offending.is_empty() {
            element_violations.push(ElementViolation {
                element: w[1].clone(),
                preceding: w[0].clone(),
                offending_timestamps: offending,
            });
        }
    }

    // (3) stroke count
    let expected_strokes = plan.strokes.len();
    let drawn_strokes = sketch.strokes.len();
    let stroke_count_ok = expected_strokes == drawn_strokes;
    let overall_pass = stroke_count_ok
        && order_violations.is_empty()
        && direction_violations.is_empty()
        && element_violations.is_empty();
    Ok(TechniqueReport {
        stroke_count_ok,
        expected_strokes,
        drawn_strokes,
        order_violations,
        direction_violations,
        indeterminate_directions: indeterminate.into_iter().collect(),
        element_violations,
        overall_pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TechniqueMetrics {
    pub total: usize,
    pub visual_matched: usize,
    pub technique_ok: usize,
    pub visual_accuracy: Option<f64>,
    pub technique_among_visual: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates from `(visual matched, technique passed)` rows. Technique is
/// only counted on visually matched rows.
pub fn metrics_from_flags(rows: impl IntoIterator<Item = (bool, bool)>) -> TechniqueMetrics {
    let (mut total, mut matched, mut ok) = (0, 0, 0);
    for (visual, technique) in rows {
        total += 1;
        if visual {
            matched += 1;
            if technique {
                ok += 1;
            }
        }
    }
    TechniqueMetrics {
        total,
        visual_matched: matched,
        technique_ok: ok,
        visual_accuracy: ratio(matched, total),
        technique_among_visual: ratio(ok, matched),
    }
}

pub fn technique_metrics<'a>(reports: impl IntoIterator<Item = (bool, Option<&'a TechniqueReport>)>) -> TechniqueMetrics {
    metrics_from_flags(
        reports
            .into_iter()
            .map(|(visual, r)| (visual, visual && r.is_some_and(|r| r.overall_pass))),
    )
}
