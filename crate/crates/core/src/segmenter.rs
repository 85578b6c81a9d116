//! Corner finding and line fitting.
//!
//! Each stroke is cut at corners found from pen speed and curvature, then
//! approximated by the polyline through those corners. Curves that stay
//! within the fit tolerance of a chord become a single line.
//!
//! Fitting is measured against the position-smoothed trace so that sample
//! jitter does not force spurious corners; the emitted primitives still end
//! on raw ink samples.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{chord_deviation, strip_half_width, Point2};
use crate::ink::{InkPoint, InkStroke, Sketch};

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("stroke {stroke} has fewer than 2 distinct samples")]
    DegenerateStroke { stroke: usize },
    #[error("stroke {stroke} cannot be split into {requested} lines (at most {available})")]
    Infeasible {
        stroke: usize,
        requested: usize,
        available: usize,
    },
    #[error("invalid segmenter config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    /// Centered moving-average window, in samples.
    pub smooth_window: usize,
    /// Speed minima below this fraction of the mean speed are corner candidates.
    pub speed_ratio: f64,
    /// Curvature maxima above this (radians per percent of box diagonal of
    /// arc length) are corner candidates.
    pub curvature_min: f64,
    pub fit_tol_frac: f64,
    pub min_seg_len_frac: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            smooth_window: 5,
            speed_ratio: 0.9,
            curvature_min: 0.75,
            fit_tol_frac: 0.02,
            min_seg_len_frac: 0.03,
        }
    }
}

impl SegmenterConfig {
    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SegmentError> {
        let bad = |m: &str| Err(SegmentError::Config(m.to_string()));
        if self.smooth_window == 0 {
            return bad("smooth_window must be at least 1");
        }
        if !(self.speed_ratio > 0.0) {
            return bad("speed_ratio must be positive");
        }
        if !(self.curvature_min > 0.0) {
            return bad("curvature_min must be positive");
        }
        if !(self.fit_tol_frac > 0.0) {
            return bad("fit_tol_frac must be positive");
        }
        if !(self.min_seg_len_frac > 0.0) {
            return bad("min_seg_len_frac must be positive");
        }
        Ok(())
    }
}

/// Identifies a primitive by its source stroke and temporal position within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimitiveId {
    pub stroke_id: usize,
    pub sub_index: usize,
}

/// A line fitted to a temporal sub-span of one stroke. `a` is the
/// temporally first endpoint, `b` the last.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DrawnPrimitive {
    pub stroke_id: usize,
    pub sub_index: usize,
    pub a: InkPoint,
    pub b: InkPoint,
    pub center: Point2,
    pub t_a: u64,
    pub t_b: u64,
}

impl DrawnPrimitive {
    pub fn new(stroke_id: usize, sub_index: usize, a: InkPoint, b: InkPoint) -> Self {
        DrawnPrimitive {
            stroke_id,
            sub_index,
            a,
            b,
            center: Point2::from(a).midpoint(Point2::from(b)),
            t_a: a.t,
            t_b: b.t,
        }
    }

    pub fn id(&self) -> PrimitiveId {
        PrimitiveId {
            stroke_id: self.stroke_id,
            sub_index: self.sub_index,
        }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(&self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentationResult {
    /// Ordered by stroke id, then sub-index.
    pub primitives: Vec<DrawnPrimitive>,
    /// Corner sample indices per stroke, endpoints included.
    pub corners_per_stroke: Vec<Vec<usize>>,
    /// Worst deviation over all strokes, in pixels.
    pub fit_error: f64,
    pub stroke_fit_errors: Vec<f64>,
    /// Box diagonal the tolerances were scaled by.
    pub box_diagonal: f64,
}

impl SegmentationResult {
    pub fn primitives_of(&self, stroke_id: usize) -> impl Iterator<Item = &DrawnPrimitive> {
        self.primitives.iter().filter(move |p| p.stroke_id == stroke_id)
    }

    /// Replaces one stroke's primitives, keeping the global ordering.
    pub fn replace_stroke(&mut self, stroke_id: usize, prims: Vec<DrawnPrimitive>, corners: Vec<usize>, error: f64) {
        self.primitives.retain(|p| p.stroke_id != stroke_id);
        self.primitives.extend(prims);
        self.primitives.sort_by_key(|p| p.id());
        self.corners_per_stroke[stroke_id] = corners;
        self.stroke_fit_errors[stroke_id] = error;
        self.fit_error = self.stroke_fit_errors.iter().copied().fold(0.0, f64::max);
    }
}

/// Centered moving average whose window shrinks symmetrically near the ends,
/// so the first and last values are kept as-is.
fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let span = &values[i - h..=i + h];
            span.iter().sum::<f64>() / span.len() as f64
        })
        .collect()
}

/// Per-stroke features shared by corner detection and fitting.
struct StrokeAnalysis<'a> {
    raw: &'a [InkPoint],
    smoothed: Vec<Point2>,
    speed: Vec<f64>,
    curvature: Vec<f64>,
}

impl<'a> StrokeAnalysis<'a> {
    fn new(points: &'a [InkPoint], cfg: &SegmenterConfig, diag: f64) -> Self {
        let n = points.len();
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let (sx, sy) = (smooth(&xs, cfg.smooth_window), smooth(&ys, cfg.smooth_window));
        let smoothed: Vec<Point2> = sx.into_iter().zip(sy).map(|(x, y)| Point2::new(x, y)).collect();

        let mut raw_speed: Vec<f64> = points
            .windows(2)
            .map(|w| w[0].distance(&w[1]) / (w[1].t.saturating_sub(w[0].t)).max(1) as f64)
            .collect();
        raw_speed.push(*raw_speed.last().unwrap_or(&0.0));
        let speed = smooth(&raw_speed, cfg.smooth_window);

        // Unwrapped direction of each smoothed step; repeated samples keep
        // the previous heading.
        let mut theta = Vec::with_capacity(n.saturating_sub(1));
        let mut prev: Option<f64> = None;
        for w in smoothed.windows(2) {
            let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
            let angle = if dx == 0.0 && dy == 0.0 {
                prev.unwrap_or(0.0)
            } else {
                let mut a = dy.atan2(dx);
                if let Some(p) = prev {
                    while a - p > std::f64::consts::PI {
                        a -= std::f64::consts::TAU;
                    }
                    while a - p < -std::f64::consts::PI {
                        a += std::f64::consts::TAU;
                    }
                }
                a
            };
            prev = Some(angle);
            theta.push(angle);
        }
        let theta = if theta.is_empty() { theta } else { smooth(&theta, cfg.smooth_window) };

        let half = cfg.smooth_window / 2;
        let mut curvature = vec![0.0; n];
        if theta.len() >= 2 {
            for (i, c) in curvature.iter_mut().enumerate().take(n - 1).skip(1) {
                let lo = i.saturating_sub(half.max(1));
                let hi = (i + half.max(1)).min(theta.len() - 1);
                let arc: f64 = smoothed[lo..=hi + 1].windows(2).map(|w| w[0].distance(w[1])).sum();
                let arc_pct = if diag > 0.0 { arc / diag * 100.0 } else { 0.0 };
                if arc_pct > 0.0 {
                    *c = (theta[hi] - theta[lo]).abs() / arc_pct;
                }
            }
        }
        StrokeAnalysis {
            raw: points,
            smoothed,
            speed,
            curvature,
        }
    }

    fn len(&self) -> usize {
        self.raw.len()
    }

    fn speed_candidates(&self, cfg: &SegmenterConfig) -> Vec<usize> {
        let n = self.len();
        if n < 3 {
            return Vec::new();
        }
        let mean = self.speed.iter().sum::<f64>() / n as f64;
        (1..n - 1)
            .filter(|&i| {
                let v = self.speed[i];
                v <= self.speed[i - 1] && v < self.speed[i + 1] && v < cfg.speed_ratio * mean
            })
            .collect()
    }

    fn curvature_candidates(&self, cfg: &SegmenterConfig) -> Vec<usize> {
        let n = self.len();
        if n < 3 {
            return Vec::new();
        }
        (1..n - 1)
            .filter(|&i| {
                let c = self.curvature[i];
                c >= self.curvature[i - 1] && c > self.curvature[i + 1] && c > cfg.curvature_min
            })
            .collect()
    }

    /// Union of speed and curvature candidates, sorted.
    fn candidates(&self, cfg: &SegmenterConfig) -> Vec<usize> {
        let mut all = self.speed_candidates(cfg);
        all.extend(self.curvature_candidates(cfg));
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Fit error of the edge `i..=j`: the largest deviation of its smoothed
    /// samples from their minimax line. Zero-duration edges are disallowed.
    fn edge_error(&self, i: usize, j: usize) -> f64 {
        if self.raw[j].t <= self.raw[i].t {
            return f64::INFINITY;
        }
        strip_half_width(&self.smoothed[i..=j])
    }

    fn polyline_error(&self, corners: &[usize]) -> f64 {
        corners.windows(2).map(|w| self.edge_error(w[0], w[1])).fold(0.0, f64::max)
    }

    fn primitives(&self, stroke_id: usize, corners: &[usize]) -> Vec<DrawnPrimitive> {
        corners
            .windows(2)
            .enumerate()
            .map(|(k, w)| DrawnPrimitive::new(stroke_id, k, self.raw[w[0]], self.raw[w[1]]))
            .collect()
    }
}

fn check_stroke(stroke: &InkStroke) -> Result<(), SegmentError> {
    let first = stroke.points.first();
    let distinct = stroke
        .points
        .iter()
        .any(|p| first.is_some_and(|f| p.x != f.x || p.y != f.y));
    if stroke.points.len() < 2 || !distinct || stroke.start_time() == stroke.end_time() {
        return Err(SegmentError::DegenerateStroke { stroke: stroke.id });
    }
    Ok(())
}

/// Fits one stroke; returns the corner indices and the fit error.
fn fit_stroke(an: &StrokeAnalysis<'_>, cfg: &SegmenterConfig, diag: f64) -> (Vec<usize>, f64) {
    let n = an.len();
    let tol = cfg.fit_tol_frac * diag;
    let half = (cfg.smooth_window / 2).max(1);

    let speed = an.speed_candidates(cfg);
    let curv = an.curvature_candidates(cfg);
    let mut corners: Vec<usize> = vec![0, n - 1];
    for &s in &speed {
        if curv.iter().any(|&c| c.abs_diff(s) <= half) {
            corners.push(s);
        }
    }
    corners.sort_unstable();
    corners.dedup();
    let mut pool: Vec<usize> = speed.iter().chain(&curv).copied().filter(|c| !corners.contains(c)).collect();
    pool.sort_unstable();
    pool.dedup();

    // Greedy refinement: add the candidate that lowers the error most.
    let mut err = an.polyline_error(&corners);
    while err > tol {
        let mut best: Option<(f64, usize)> = None;
        for (pi, &c) in pool.iter().enumerate() {
            let mut trial = corners.clone();
            let at = trial.partition_point(|&x| x < c);
            trial.insert(at, c);
            let e = an.polyline_error(&trial);
            if best.is_none_or(|(be, _)| e < be) {
                best = Some((e, pi));
            }
        }
        let chosen = match best {
            Some((e, pi)) if e < err => pool.remove(pi),
            _ => worst_sample(an, &corners),
        };
        let at = corners.partition_point(|&x| x < chosen);
        corners.insert(at, chosen);
        err = an.polyline_error(&corners);
    }

    merge_close_corners(an, &mut corners, cfg.min_seg_len_frac * diag, cfg.smooth_window, tol);
    drop_redundant_corners(an, &mut corners, tol);
    refine_corners(an, &mut corners, cfg.smooth_window);
    let err = an.polyline_error(&corners);
    (corners, err)
}

/// The sample farthest from its edge, used when no candidate helps.
fn worst_sample(an: &StrokeAnalysis<'_>, corners: &[usize]) -> usize {
    let mut best = (f64::NEG_INFINITY, corners[0] + 1);
    for w in corners.windows(2) {
        let (a, b) = (an.smoothed[w[0]], an.smoothed[w[1]]);
        for k in w[0] + 1..w[1] {
            let d = chord_deviation(an.smoothed[k], a, b);
            if d > best.0 {
                best = (d, k);
            }
        }
    }
    best.1
}

/// Removes interior corners that sit closer than `min_len` to a neighbour
/// corner, as long as the fit stays within tolerance. Zero-duration edges are
/// always collapsed.
fn merge_close_corners(an: &StrokeAnalysis<'_>, corners: &mut Vec<usize>, min_len: f64, window: usize, tol: f64) {
    let mut k = 0;
    while k + 1 < corners.len() {
        let (i, j) = (corners[k], corners[k + 1]);
        // Within one smoothing window the two picks describe the same turn.
        let short = an.raw[i].distance(&an.raw[j]) < min_len || j - i <= window;
        let instant = an.raw[j].t <= an.raw[i].t;
        if !(short || instant) || corners.len() <= 2 {
            k += 1;
            continue;
        }
        // Options: drop an interior one of the pair, or, when both are
        // interior, replace the pair by one sample between them.
        let mut options: Vec<(f64, Vec<usize>)> = Vec::new();
        for idx in [k, k + 1] {
            if idx > 0 && idx + 1 < corners.len() {
                let mut trial = corners.clone();
                trial.remove(idx);
                options.push((an.polyline_error(&trial), trial));
            }
        }
        if k > 0 && k + 2 < corners.len() {
            let lo = (corners[k - 1] + 1).max(i.saturating_sub(window));
            let hi = (corners[k + 2] - 1).min(j + window);
            for m in lo..=hi {
                let mut trial = corners.clone();
                trial.splice(k..=k + 1, [m]);
                options.push((an.polyline_error(&trial), trial));
            }
        }
        let best = options.into_iter().min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        match best {
            Some((e, trial)) if e <= tol || instant => {
                *corners = trial;
                k = k.saturating_sub(1);
            }
            _ => k += 1,
        }
    }
}

/// Moves each interior corner within a smoothing window to where its two
/// edges fit best.
fn refine_corners(an: &StrokeAnalysis<'_>, corners: &mut [usize], window: usize) {
    for k in 1..corners.len().saturating_sub(1) {
        let (prev, next) = (corners[k - 1], corners[k + 1]);
        let local = |m: usize| an.edge_error(prev, m).max(an.edge_error(m, next));
        let lo = (prev + 1).max(corners[k].saturating_sub(window));
        let hi = (next - 1).min(corners[k] + window);
        let mut best = (local(corners[k]), corners[k]);
        for m in lo..=hi {
            let e = local(m);
            if e < best.0 {
                best = (e, m);
            }
        }
        corners[k] = best.1;
    }
}

/// Drops interior corners the fit does not need, least useful first.
fn drop_redundant_corners(an: &StrokeAnalysis<'_>, corners: &mut Vec<usize>, tol: f64) {
    loop {
        let mut best: Option<(f64, usize)> = None;
        for idx in 1..corners.len().saturating_sub(1) {
            let e = an.edge_error(corners[idx - 1], corners[idx + 1]);
            if e <= tol && best.is_none_or(|(be, _)| e < be) {
                best = Some((e, idx));
            }
        }
        match best {
            Some((_, idx)) => {
                corners.remove(idx);
            }
            None => break,
        }
    }
}

/// Segments every stroke of `sketch` into line primitives.
pub fn segment(sketch: &Sketch, cfg: &SegmenterConfig) -> Result<SegmentationResult, SegmentError> {
    cfg.validate()?;
    for s in &sketch.strokes {
        check_stroke(s)?;
    }
    let diag = match sketch.bounding_box() {
        Ok(bb) => bb.diagonal(),
        Err(_) => {
            return Ok(SegmentationResult {
                primitives: Vec::new(),
                corners_per_stroke: Vec::new(),
                fit_error: 0.0,
                stroke_fit_errors: Vec::new(),
                box_diagonal: 0.0,
            })
        }
    };
    let mut primitives = Vec::new();
    let mut corners_per_stroke = Vec::with_capacity(sketch.strokes.len());
    let mut stroke_fit_errors = Vec::with_capacity(sketch.strokes.len());
    for stroke in &sketch.strokes {
        let an = StrokeAnalysis::new(&stroke.points, cfg, diag);
        let (corners, err) = fit_stroke(&an, cfg, diag);
        primitives.extend(an.primitives(stroke.id, &corners));
        corners_per_stroke.push(corners);
        stroke_fit_errors.push(err);
    }
    Ok(SegmentationResult {
        primitives,
        corners_per_stroke,
        fit_error: stroke_fit_errors.iter().copied().fold(0.0, f64::max),
        stroke_fit_errors,
        box_diagonal: diag,
    })
}

/// Result of a forced-count refit of one stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedFit {
    pub primitives: Vec<DrawnPrimitive>,
    pub corners: Vec<usize>,
    pub max_deviation: f64,
}

/// Splits `stroke` into exactly `k` primitives, choosing corners that
/// minimise the worst deviation. Corners come from the speed/curvature
/// candidates and their neighbours, or from every sample when there are
/// too few of those.
/// Among equally good splits the one with the earliest corners wins.
///
/// `box_diagonal` is the scale the curvature threshold refers to; pass the
/// diagonal of the sketch the stroke belongs to.
pub fn resegment_with_forced_count(
    stroke: &InkStroke,
    k: usize,
    cfg: &SegmenterConfig,
    box_diagonal: f64,
) -> Result<ForcedFit, SegmentError> {
    cfg.validate()?;
    check_stroke(stroke)?;
    let n = stroke.points.len();
    let available = distinct_span_count(&stroke.points);
    if k == 0 || k > available {
        return Err(SegmentError::Infeasible {
            stroke: stroke.id,
            requested: k,
            available,
        });
    }
    let an = StrokeAnalysis::new(&stroke.points, cfg, box_diagonal);
    // Each candidate brings its smoothing-window neighbourhood, the range
    // the free fit may refine a corner over.
    let w = cfg.smooth_window;
    let mut pool: Vec<usize> = an
        .candidates(cfg)
        .into_iter()
        .flat_map(|c| c.saturating_sub(w).max(1)..=(c + w).min(n - 2))
        .collect();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() + 1 < k {
        pool = (1..n - 1).collect();
    }
    let mut nodes = vec![0];
    nodes.extend(pool);
    nodes.push(n - 1);

    let corners = min_max_split(&an, &nodes, k).ok_or(SegmentError::Infeasible {
        stroke: stroke.id,
        requested: k,
        available,
    })?;
    let max_deviation = an.polyline_error(&corners);
    Ok(ForcedFit {
        primitives: an.primitives(stroke.id, &corners),
        corners,
        max_deviation,
    })
}

/// Number of edges a polyline through distinct, strictly timed samples can have.
fn distinct_span_count(points: &[InkPoint]) -> usize {
    let mut count = 0;
    let mut last = points[0];
    for p in &points[1..] {
        if p.t > last.t && (p.x != last.x || p.y != last.y) {
            count += 1;
            last = *p;
        }
    }
    count
}

/// Exact min-max polyline over `nodes` with `k` edges, lexicographically
/// earliest among optimal solutions.
fn min_max_split(an: &StrokeAnalysis<'_>, nodes: &[usize], k: usize) -> Option<Vec<usize>> {
    let m = nodes.len();
    let mut err = vec![vec![f64::INFINITY; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            err[i][j] = an.edge_error(nodes[i], nodes[j]);
        }
    }
    // suffix[e][i]: best max error from node i to the last node using e edges.
    let mut suffix = vec![vec![f64::INFINITY; m]; k + 1];
    suffix[0][m - 1] = 0.0;
    for e in 1..=k {
        for i in (0..m).rev() {
            let mut best = f64::INFINITY;
            for j in i + 1..m {
                let v = err[i][j].max(suffix[e - 1][j]);
                if v < best {
                    best = v;
                }
            }
            suffix[e][i] = best;
        }
    }
    let optimum = suffix[k][0];
    if !optimum.is_finite() {
        return None;
    }
    let mut corners = vec![nodes[0]];
    let mut at = 0;
    for e in (1..=k).rev() {
        let next = (at + 1..m).find(|&j| err[at][j].max(suffix[e - 1][j]) <= optimum)?;
        corners.push(nodes[next]);
        at = next;
    }
    Some(corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ink::Sketch;

    fn stroke_from(pts: &[(f64, f64, u64)]) -> InkStroke {
        InkStroke::new(0, pts.iter().map(|&(x, y, t)| InkPoint::new(x, y, t)).collect())
    }

    fn straight(n: usize) -> InkStroke {
        let pts: Vec<(f64, f64, u64)> = (0..n)
            .map(|i| (100.0 * i as f64 / (n - 1) as f64, 50.0, 10 * i as u64))
            .collect();
        stroke_from(&pts)
    }

    /// (0,0)→(100,0)→(100,100) with the pen slowing into the corner.
    pub(crate) fn right_angle(n: usize) -> InkStroke {
        let mut pts = Vec::with_capacity(n);
        let mut t = 0u64;
        for i in 0..n {
            let s = 200.0 * i as f64 / (n - 1) as f64;
            let (x, y) = if s <= 100.0 { (s, 0.0) } else { (100.0, s - 100.0) };
            let dist_to_corner = (s - 100.0).abs();
            if i > 0 {
                t += if dist_to_corner < 12.0 { 30 } else { 10 };
            }
            pts.push((x, y, t));
        }
        stroke_from(&pts)
    }

    fn sketch_of(stroke: InkStroke) -> Sketch {
        Sketch::new(vec![stroke], 200.0, 200.0).unwrap()
    }

    #[test]
    fn straight_stroke_gives_one_primitive() {
        let r = segment(&sketch_of(straight(50)), &SegmenterConfig::default()).unwrap();
        assert_eq!(r.primitives.len(), 1);
        assert_eq!(r.corners_per_stroke[0], vec![0, 49]);
        let p = &r.primitives[0];
        assert_eq!((p.a.x, p.b.x), (0.0, 100.0));
        assert_eq!(p.center, Point2::new(50.0, 50.0));
        assert!(p.t_a < p.t_b);
    }

    #[test]
    fn degenerate_stroke_rejected() {
        let s = stroke_from(&[(5.0, 5.0, 0), (5.0, 5.0, 10)]);
        let sk = Sketch::new(vec![s], 10.0, 10.0).unwrap();
        assert_eq!(
            segment(&sk, &SegmenterConfig::default()),
            Err(SegmentError::DegenerateStroke { stroke: 0 })
        );
    }

    #[test]
    fn smoothing_keeps_endpoints() {
        let v = [0.0, 10.0, 0.0, 10.0, 0.0, 10.0];
        let s = smooth(&v, 5);
        assert_eq!(s[0], 0.0);
        assert_eq!(s[5], 10.0);
        assert!((s[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn forced_count_errors() {
        let s = straight(5);
        assert!(matches!(
            resegment_with_forced_count(&s, 5, &SegmenterConfig::default(), 100.0),
            Err(SegmentError::Infeasible { available: 4, .. })
        ));
        assert!(resegment_with_forced_count(&s, 0, &SegmenterConfig::default(), 100.0).is_err());
        let fit = resegment_with_forced_count(&s, 4, &SegmenterConfig::default(), 100.0).unwrap();
        assert_eq!(fit.corners, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn forced_single_edge_is_full_span() {
        let s = straight(30);
        let fit = resegment_with_forced_count(&s, 1, &SegmenterConfig::default(), 100.0).unwrap();
        assert_eq!(fit.corners, vec![0, 29]);
        assert_eq!(fit.primitives.len(), 1);
    }

    #[test]
    fn replace_stroke_keeps_order() {
        let sk = Sketch::new(
            vec![straight(20), InkStroke { id: 1, points: right_angle(60).points.iter().map(|p| InkPoint::new(p.x, p.y + 10.0, p.t + 1000)).collect() }],
            300.0,
            300.0,
        )
        .unwrap();
        let cfg = SegmenterConfig::default();
        let mut r = segment(&sk, &cfg).unwrap();
        let fit = resegment_with_forced_count(&sk.strokes[0], 2, &cfg, r.box_diagonal).unwrap();
        r.replace_stroke(0, fit.primitives, fit.corners, fit.max_deviation);
        let ids: Vec<PrimitiveId> = r.primitives.iter().map(|p| p.id()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(r.primitives_of(0).count(), 2);
    }
}
