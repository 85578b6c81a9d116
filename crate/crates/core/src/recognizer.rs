//! Visual structure recognition.
//!
//! A description is flattened into its line set; recognition searches for
//! an injective assignment of drawn primitives to those lines, with an
//! endpoint orientation per line, under which every constraint holds.
//! Drawing order and direction never influence the visual verdict.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{LandmarkRole, OrientedLine, Resolved, ToleranceProfile, Landmark};
use crate::dsl::{FlatArg, FlatShape, LibraryError, ShapeLibrary};
use crate::geometry::Point2;
use crate::ink::{BoundingBox, Sketch};
use crate::segmenter::{
    resegment_with_forced_count, segment, DrawnPrimitive, PrimitiveId, SegmentError, SegmentationResult,
    SegmenterConfig,
};

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
}

/// Which temporal end of the primitive plays the role of `p1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Orientation {
    AIsP1,
    BIsP1,
}

impl Orientation {
    const BOTH: [Orientation; 2] = [Orientation::AIsP1, Orientation::BIsP1];

    pub fn flipped(self) -> Self {
        match self {
            Orientation::AIsP1 => Orientation::BIsP1,
            Orientation::BIsP1 => Orientation::AIsP1,
        }
    }
}

/// The oriented line a primitive presents under `o`.
pub fn oriented(p: &DrawnPrimitive, o: Orientation) -> OrientedLine {
    let a = Landmark::timed(Point2::from(p.a), p.t_a);
    let b = Landmark::timed(Point2::from(p.b), p.t_b);
    match o {
        Orientation::AIsP1 => OrientedLine { p1: a, p2: b },
        Orientation::BIsP1 => OrientedLine { p1: b, p2: a },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineAssignment {
    pub path: String,
    pub primitive: DrawnPrimitive,
    pub orientation: Orientation,
    /// True when every satisfying orientation choice for this mapping
    /// agrees on this line's orientation.
    pub role_pinned: bool,
}

impl LineAssignment {
    pub fn line(&self) -> OrientedLine {
        oriented(&self.primitive, self.orientation)
    }

    /// Ink time of the landmark `role` (p1 or p2) under this binding.
    pub fn endpoint_time(&self, role: LandmarkRole) -> Option<u64> {
        self.line().landmark(role).timestamp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Binding {
    /// In flattened description order.
    pub lines: Vec<LineAssignment>,
    /// Sub-shape instance path → primitives bound inside it.
    pub sub_shape_spans: BTreeMap<String, BTreeSet<PrimitiveId>>,
}

impl Binding {
    pub fn get(&self, path: &str) -> Option<&LineAssignment> {
        self.lines.iter().find(|l| l.path == path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FailureKind {
    StrokeCountMismatch,
    NoConsistentAssignment,
    /// The ink could not be processed at all (e.g. a degenerate stroke).
    InvalidInk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VisualFailure {
    pub kind: FailureKind,
    /// Constraints violated by the closest assignment found.
    pub detail: Vec<String>,
    pub expected_lines: usize,
    pub drawn_primitives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VisualVerdict {
    pub matched: bool,
    pub binding: Option<Binding>,
    pub failure: Option<VisualFailure>,
}

impl VisualVerdict {
    fn success(binding: Binding) -> Self {
        VisualVerdict {
            matched: true,
            binding: Some(binding),
            failure: None,
        }
    }

    fn failed(failure: VisualFailure) -> Self {
        VisualVerdict {
            matched: false,
            binding: None,
            failure: Some(failure),
        }
    }
}

/// Box diagonal spanned by primitive endpoints; tolerances scale with it.
pub fn primitives_diagonal(prims: &[DrawnPrimitive]) -> f64 {
    BoundingBox::of_points(prims.iter().flat_map(|p| [&p.a, &p.b]))
        .map(|b| b.diagonal())
        .unwrap_or(0.0)
}

/// Constraint-checking state for one (flattened shape, primitive set) pair.
pub(crate) struct Problem<'a> {
    pub flat: &'a FlatShape,
    /// Sorted by (stroke id, sub-index).
    pub prims: Vec<DrawnPrimitive>,
    pub tol: ToleranceProfile,
    pub diag: f64,
    /// Constraints to check once line `i` is the highest-numbered line
    /// assigned among their arguments.
    check_at: Vec<Vec<usize>>,
}

impl<'a> Problem<'a> {
    pub fn new(flat: &'a FlatShape, prims: &[DrawnPrimitive], tol: &ToleranceProfile) -> Self {
        let mut sorted = prims.to_vec();
        sorted.sort_by_key(|p| p.id());
        let mut check_at = vec![Vec::new(); flat.lines.len()];
        for (ci, c) in flat.constraints.iter().enumerate() {
            if let Some(max) = c.args.iter().map(|a| a.line()).max() {
                check_at[max].push(ci);
            }
        }
        Problem {
            flat,
            diag: primitives_diagonal(&sorted),
            prims: sorted,
            tol: *tol,
            check_at,
        }
    }

    pub fn n_lines(&self) -> usize {
        self.flat.lines.len()
    }

    /// Evaluates constraint `ci` with `assign[line] = Some((prim, orientation))`.
    /// Unassigned arguments make the result `None`.
    pub fn eval(&self, ci: usize, assign: &[Option<(usize, Orientation)>]) -> Option<bool> {
        let c = &self.flat.constraints[ci];
        let mut args = Vec::with_capacity(c.args.len());
        for a in &c.args {
            let (p, o) = assign[a.line()]?;
            let line = oriented(&self.prims[p], o);
            args.push(match *a {
                FlatArg::Line(_) => Resolved::Line(line),
                FlatArg::Point(_, role) => Resolved::Point(line.landmark(role)),
            });
        }
        Some(c.predicate.eval(&args, &self.tol, self.diag).unwrap_or(false))
    }

    fn checks_pass(&self, line: usize, assign: &[Option<(usize, Orientation)>]) -> bool {
        self.check_at[line].iter().all(|&ci| self.eval(ci, assign) == Some(true))
    }

    /// First satisfying assignment in (line, primitive, orientation)
    /// lexicographic order.
    pub fn solve(&self) -> Option<Vec<(usize, Orientation)>> {
        let n = self.n_lines();
        if n != self.prims.len() {
            return None;
        }
        // Unary filter: candidates per line surviving their own single-line constraints.
        let mut candidates: Vec<Vec<(usize, Orientation)>> = Vec::with_capacity(n);
        for line in 0..n {
            let own: Vec<usize> = self.flat.constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.args.iter().all(|a| a.line() == line))
                .map(|(i, _)| i)
                .collect();
            let mut assign = vec![None; n];
            let mut list = Vec::new();
            for p in 0..self.prims.len() {
                for o in Orientation::BOTH {
                    assign[line] = Some((p, o));
                    if own.iter().all(|&ci| self.eval(ci, &assign) == Some(true)) {
                        list.push((p, o));
                    }
                }
            }
            if list.is_empty() {
                return None;
            }
            candidates.push(list);
        }
        let mut assign = vec![None; n];
        let mut used = vec![false; self.prims.len()];
        if self.dfs(0, &candidates, &mut assign, &mut used) {
            Some(assign.into_iter().map(|a| a.expect("complete")).collect())
        } else {
            None
        }
    }

    fn dfs(
        &self,
        line: usize,
        candidates: &[Vec<(usize, Orientation)>],
        assign: &mut Vec<Option<(usize, Orientation)>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if line == candidates.len() {
            return true;
        }
        for &(p, o) in &candidates[line] {
            if used[p] {
                continue;
            }
            assign[line] = Some((p, o));
            if self.checks_pass(line, assign) {
                used[p] = true;
                if self.dfs(line + 1, candidates, assign, used) {
                    return true;
                }
                used[p] = false;
            }
        }
        assign[line] = None;
        false
    }

    /// For a fixed line→primitive mapping, which lines keep the same
    /// orientation across every satisfying orientation vector.
    pub fn pinned_roles(&self, mapping: &[usize]) -> Vec<bool> {
        let n = mapping.len();
        let mut seen: Vec<[bool; 2]> = vec![[false; 2]; n];
        let mut assign = vec![None; n];
        self.enumerate_orientations(0, mapping, &mut assign, &mut seen);
        seen.iter().map(|s| !(s[0] && s[1])).collect()
    }

    fn enumerate_orientations(
        &self,
        line: usize,
        mapping: &[usize],
        assign: &mut Vec<Option<(usize, Orientation)>>,
        seen: &mut Vec<[bool; 2]>,
    ) {
        if line == mapping.len() {
            for (i, a) in assign.iter().enumerate() {
                let o = a.expect("complete").1;
                seen[i][o as usize] = true;
            }
            return;
        }
        for o in Orientation::BOTH {
            assign[line] = Some((mapping[line], o));
            if self.checks_pass(line, assign) {
                self.enumerate_orientations(line + 1, mapping, assign, seen);
                // Both orientations of every line already seen: nothing left to learn.
                if seen.iter().all(|s| s[0] && s[1]) {
                    break;
                }
            }
        }
        assign[line] = None;
    }

    /// Closest complete assignment by number of violated constraints;
    /// returns the texts of those violations. Bounded exploration.
    pub fn diagnose(&self, node_budget: usize) -> Vec<String> {
        let n = self.n_lines();
        if n == 0 || n != self.prims.len() {
            return Vec::new();
        }
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut assign = vec![None; n];
        let mut used = vec![false; self.prims.len()];
        let mut budget = node_budget;
        self.bnb(0, 0, &mut assign, &mut used, &mut best, &mut budget);
        match best {
            Some((_, violated)) => violated.iter().map(|&ci| self.flat.constraints[ci].text.clone()).collect(),
            None => Vec::new(),
        }
    }

    fn bnb(
        &self,
        line: usize,
        violations: usize,
        assign: &mut Vec<Option<(usize, Orientation)>>,
        used: &mut Vec<bool>,
        best: &mut Option<(usize, Vec<usize>)>,
        budget: &mut usize,
    ) {
        if *budget == 0 {
            return;
        }
        *budget -= 1;
        if line == self.n_lines() {
            if best.as_ref().is_none_or(|(b, _)| violations < *b) {
                let violated = (0..self.flat.constraints.len())
                    .filter(|&ci| self.eval(ci, assign) != Some(true))
                    .collect();
                *best = Some((violations, violated));
            }
            return;
        }
        for p in 0..self.prims.len() {
            if used[p] {
                continue;
            }
            for o in Orientation::BOTH {
                assign[line] = Some((p, o));
                let added = self.check_at[line]
                    .iter()
                    .filter(|&&ci| self.eval(ci, assign) != Some(true))
                    .count();
                let total = violations + added;
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    used[p] = true;
                    self.bnb(line + 1, total, assign, used, best, budget);
                    used[p] = false;
                }
            }
        }
        assign[line] = None;
    }

    pub fn binding(&self, solution: &[(usize, Orientation)]) -> Binding {
        let mapping: Vec<usize> = solution.iter().map(|&(p, _)| p).collect();
        let pinned = self.pinned_roles(&mapping);
        let mut spans: BTreeMap<String, BTreeSet<PrimitiveId>> = BTreeMap::new();
        let lines = solution
            .iter()
            .enumerate()
            .map(|(i, &(p, o))| {
                let fl = &self.flat.lines[i];
                let prim = self.prims[p];
                // Every enclosing sub-shape instance gets the primitive.
                let segs: Vec<&str> = fl.path.split('.').collect();
                for depth in 1..segs.len() {
                    spans.entry(segs[..depth].join(".")).or_default().insert(prim.id());
                }
                LineAssignment {
                    path: fl.path.clone(),
                    primitive: prim,
                    orientation: o,
                    role_pinned: pinned[i],
                }
            })
            .collect();
        Binding {
            lines,
            sub_shape_spans: spans,
        }
    }
}

const DIAGNOSE_BUDGET: usize = 200_000;

fn recognize_flat(primitives: &[DrawnPrimitive], flat: &FlatShape, tol: &ToleranceProfile) -> VisualVerdict {
    let problem = Problem::new(flat, primitives, tol);
    if problem.n_lines() != primitives.len() {
        return VisualVerdict::failed(VisualFailure {
            kind: FailureKind::StrokeCountMismatch,
            detail: Vec::new(),
            expected_lines: problem.n_lines(),
            drawn_primitives: primitives.len(),
        });
    }
    match problem.solve() {
        Some(sol) => VisualVerdict::success(problem.binding(&sol)),
        None => VisualVerdict::failed(VisualFailure {
            kind: FailureKind::NoConsistentAssignment,
            detail: problem.diagnose(DIAGNOSE_BUDGET),
            expected_lines: problem.n_lines(),
            drawn_primitives: primitives.len(),
        }),
    }
}

/// Matches primitives against `target` without any resegmentation.
pub fn recognize(
    primitives: &[DrawnPrimitive],
    target: &str,
    lib: &ShapeLibrary,
    tol: &ToleranceProfile,
) -> Result<VisualVerdict, RecognizeError> {
    let flat = lib.flatten(target)?;
    Ok(recognize_flat(primitives, &flat, tol))
}

/// Segments `sketch` and recognizes it, retrying once with a forced
/// re-fit when the primitive count is off by one. The retry is kept only
/// if it matches.
pub fn recognize_sketch(
    sketch: &Sketch,
    seg_cfg: &SegmenterConfig,
    target: &str,
    lib: &ShapeLibrary,
    tol: &ToleranceProfile,
) -> Result<(VisualVerdict, SegmentationResult), RecognizeError> {
    let flat = lib.flatten(target)?;
    let seg = segment(sketch, seg_cfg)?;
    let verdict = recognize_flat(&seg.primitives, &flat, tol);
    let needed = flat.lines.len();
    let drawn = seg.primitives.len();
    if verdict.matched || drawn.abs_diff(needed) != 1 {
        return Ok((verdict, seg));
    }
    if let Some(retry) = recover_count(sketch, &seg, seg_cfg, needed) {
        let second = recognize_flat(&retry.primitives, &flat, tol);
        if second.matched {
            return Ok((second, retry));
        }
    }
    Ok((verdict, seg))
}

fn recover_count(
    sketch: &Sketch,
    seg: &SegmentationResult,
    cfg: &SegmenterConfig,
    needed: usize,
) -> Option<SegmentationResult> {
    let drawn = seg.primitives.len();
    let count_of = |sid: usize| seg.primitives_of(sid).count();
    let choice = if drawn < needed {
        // Under-fragmented: split the stroke with the worst fit.
        let mut ids: Vec<usize> = (0..sketch.strokes.len()).collect();
        ids.sort_by(|&a, &b| seg.stroke_fit_errors[b].total_cmp(&seg.stroke_fit_errors[a]).then(a.cmp(&b)));
        ids.into_iter().find_map(|sid| {
            resegment_with_forced_count(&sketch.strokes[sid], count_of(sid) + 1, cfg, seg.box_diagonal)
                .ok()
                .map(|fit| (sid, fit))
        })
    } else {
        // Over-fragmented: merge where it costs the least deviation.
        (0..sketch.strokes.len())
            .filter(|&sid| count_of(sid) >= 2)
            .filter_map(|sid| {
                resegment_with_forced_count(&sketch.strokes[sid], count_of(sid) - 1, cfg, seg.box_diagonal)
                    .ok()
                    .map(|fit| (sid, fit))
            })
            .min_by(|a, b| a.1.max_deviation.total_cmp(&b.1.max_deviation).then(a.0.cmp(&b.0)))
    };
    let (sid, fit) = choice?;
    let mut retry = seg.clone();
    retry.replace_stroke(sid, fit.primitives, fit.corners, fit.max_deviation);
    Some(retry)
}

/// Every description the primitives match, most lines first, then by name.
pub fn classify(
    primitives: &[DrawnPrimitive],
    lib: &ShapeLibrary,
    tol: &ToleranceProfile,
) -> Result<Vec<String>, RecognizeError> {
    if primitives.is_empty() {
        return Ok(Vec::new());
    }
    let mut hits = Vec::new();
    for name in lib.names() {
        let flat = lib.flatten(name)?;
        if flat.lines.len() != primitives.len() {
            continue;
        }
        if recognize_flat(primitives, &flat, tol).matched {
            hits.push((flat.lines.len(), name.to_string()));
        }
    }
    hits.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(hits.into_iter().map(|(_, n)| n).collect())
}

/// Segments and classifies a whole sketch. When nothing matches at the
/// segmented count, shapes one line away get the same forced re-fit as
/// `recognize_sketch`.
pub fn classify_sketch(
    sketch: &Sketch,
    seg_cfg: &SegmenterConfig,
    lib: &ShapeLibrary,
    tol: &ToleranceProfile,
) -> Result<(Vec<String>, SegmentationResult), RecognizeError> {
    let seg = segment(sketch, seg_cfg)?;
    let direct = classify(&seg.primitives, lib, tol)?;
    if !direct.is_empty() || seg.primitives.is_empty() {
        return Ok((direct, seg));
    }
    let drawn = seg.primitives.len();
    let mut hits = Vec::new();
    for name in lib.names() {
        let n = lib.flatten(name)?.lines.len();
        if n.abs_diff(drawn) != 1 {
            continue;
        }
        if recognize_sketch(sketch, seg_cfg, name, lib, tol)?.0.matched {
            hits.push((n, name.to_string()));
        }
    }
    hits.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok((hits.into_iter().map(|(_, n)| n).collect(), seg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementalStatus {
    Consistent,
    Complete,
    Inconsistent,
}

/// Status of a partially drawn sketch against `target`.
pub fn incremental_status(
    primitives: &[DrawnPrimitive],
    target: &str,
    lib: &ShapeLibrary,
    tol: &ToleranceProfile,
) -> Result<IncrementalStatus, RecognizeError> {
    let flat = lib.flatten(target)?;
    let n = flat.lines.len();
    if primitives.len() > n {
        return Ok(IncrementalStatus::Inconsistent);
    }
    if primitives.len() == n && recognize_flat(primitives, &flat, tol).matched {
        return Ok(IncrementalStatus::Complete);
    }
    if primitives.len() == n {
        return Ok(IncrementalStatus::Inconsistent);
    }
    let problem = Problem::new(&flat, primitives, tol);
    let mut assign: Vec<Option<(usize, Orientation)>> = vec![None; n];
    let mut used_lines = vec![false; n];
    if partial_dfs(&problem, 0, &mut assign, &mut used_lines) {
        Ok(IncrementalStatus::Consistent)
    } else {
        Ok(IncrementalStatus::Inconsistent)
    }
}

/// Assigns primitive `k` and onward to distinct lines, checking every
/// constraint whose arguments are all assigned.
fn partial_dfs(
    problem: &Problem<'_>,
    k: usize,
    assign: &mut Vec<Option<(usize, Orientation)>>,
    used_lines: &mut Vec<bool>,
) -> bool {
    if k == problem.prims.len() {
        return true;
    }
    for line in 0..problem.n_lines() {
        if used_lines[line] {
            continue;
        }
        for o in Orientation::BOTH {
            assign[line] = Some((k, o));
            let ok = problem
                .flat
                .constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.args.iter().any(|a| a.line() == line))
                .all(|(ci, _)| problem.eval(ci, assign) != Some(false));
            if ok {
                used_lines[line] = true;
                if partial_dfs(problem, k + 1, assign, used_lines) {
                    return true;
                }
                used_lines[line] = false;
            }
        }
        assign[line] = None;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_description, ShapeLibrary};
    use crate::ink::InkPoint;

    const TEN: &str = "name: Ten
components:
Line horzLine
Line vertLine
constraints:
Horizontal horzLine
Vertical vertLine
LeftOf horzLine.p1 horzLine.p2
Above vertLine.p1 vertLine.p2
SameSize horzLine vertLine
SameX horzLine.center vertLine.center
SameY horzLine.center vertLine.center
";

    fn ten_lib() -> ShapeLibrary {
        ShapeLibrary::from_descriptions(vec![parse_description(TEN).unwrap()]).unwrap()
    }

    fn prim(stroke: usize, (x1, y1, t1): (f64, f64, u64), (x2, y2, t2): (f64, f64, u64)) -> DrawnPrimitive {
        DrawnPrimitive::new(stroke, 0, InkPoint::new(x1, y1, t1), InkPoint::new(x2, y2, t2))
    }

    #[test]
    fn canonical_ten_matches() {
        let h = prim(0, (20.0, 50.0, 0), (80.0, 50.0, 300));
        let v = prim(1, (50.0, 20.0, 600), (50.0, 80.0, 900));
        let verdict = recognize(&[h, v], "Ten", &ten_lib(), &ToleranceProfile::default()).unwrap();
        assert!(verdict.matched);
        let b = verdict.binding.unwrap();
        assert_eq!(b.get("horzLine").unwrap().primitive, h);
        assert_eq!(b.get("horzLine").unwrap().orientation, Orientation::AIsP1);
        assert_eq!(b.get("vertLine").unwrap().primitive, v);
        assert!(b.lines.iter().all(|l| l.role_pinned));
    }

    #[test]
    fn reversed_order_and_direction_still_match() {
        let v = prim(0, (50.0, 20.0, 0), (50.0, 80.0, 300));
        let h = prim(1, (80.0, 50.0, 600), (20.0, 50.0, 900));
        let verdict = recognize(&[v, h], "Ten", &ten_lib(), &ToleranceProfile::default()).unwrap();
        let b = verdict.binding.unwrap();
        let hl = b.get("horzLine").unwrap();
        assert_eq!(hl.primitive, h);
        assert_eq!(hl.orientation, Orientation::BIsP1);
        assert_eq!(b.get("vertLine").unwrap().primitive, v);
    }

    #[test]
    fn shifted_vertical_reports_same_x() {
        // Box is 60 wide, 60 tall, plus the shift: diag ~ 92.
        let h = prim(0, (20.0, 50.0, 0), (80.0, 50.0, 300));
        let v = prim(1, (68.0, 20.0, 600), (68.0, 80.0, 900));
        let diag = primitives_diagonal(&[h, v]);
        assert!((68.0 - 50.0) > 0.2 * diag - 1.0);
        let verdict = recognize(&[h, v], "Ten", &ten_lib(), &ToleranceProfile::default()).unwrap();
        assert!(!verdict.matched);
        let f = verdict.failure.unwrap();
        assert_eq!(f.kind, FailureKind::NoConsistentAssignment);
        assert_eq!(f.detail, vec!["SameX(horzLine.center, vertLine.center)".to_string()]);
    }

    #[test]
    fn count_mismatch() {
        let h = prim(0, (20.0, 50.0, 0), (80.0, 50.0, 300));
        let verdict = recognize(&[h], "Ten", &ten_lib(), &ToleranceProfile::default()).unwrap();
        let f = verdict.failure.unwrap();
        assert_eq!((f.kind, f.expected_lines, f.drawn_primitives), (FailureKind::StrokeCountMismatch, 2, 1));
    }

    #[test]
    fn incremental_examples() {
        let lib = ten_lib();
        let tol = ToleranceProfile::default();
        let h = prim(0, (20.0, 50.0, 0), (80.0, 50.0, 300));
        let v = prim(1, (50.0, 20.0, 600), (50.0, 80.0, 900));
        let diag = prim(0, (20.0, 20.0, 0), (80.0, 80.0, 300));
        assert_eq!(incremental_status(&[h], "Ten", &lib, &tol).unwrap(), IncrementalStatus::Consistent);
        assert_eq!(incremental_status(&[h, v], "Ten", &lib, &tol).unwrap(), IncrementalStatus::Complete);
        assert_eq!(incremental_status(&[diag], "Ten", &lib, &tol).unwrap(), IncrementalStatus::Inconsistent);
        assert_eq!(incremental_status(&[h, v, h], "Ten", &lib, &tol).unwrap(), IncrementalStatus::Inconsistent);
    }

    #[test]
    fn unpinned_when_only_size_is_constrained() {
        let loose = "name: Ten\ncomponents:\nLine horzLine\nLine vertLine\nconstraints:\nSameSize horzLine vertLine\n";
        let lib = ShapeLibrary::from_descriptions(vec![parse_description(loose).unwrap()]).unwrap();
        let h = prim(0, (20.0, 50.0, 0), (80.0, 50.0, 300));
        let v = prim(1, (50.0, 20.0, 600), (50.0, 80.0, 900));
        let b = recognize(&[h, v], "Ten", &lib, &ToleranceProfile::default()).unwrap().binding.unwrap();
        assert!(b.lines.iter().all(|l| !l.role_pinned));
    }

    #[test]
    fn classify_empty() {
        assert!(classify(&[], &ten_lib(), &ToleranceProfile::default()).unwrap().is_empty());
    }
}
