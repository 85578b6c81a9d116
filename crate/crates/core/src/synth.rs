//! Seeded synthetic ink for the shipped glyphs, with programmed
//! order/direction mutations and optional positional jitter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::Point2;
use crate::ink::{BoundingBox, InkPoint, InkStroke, Sketch};

/// Canonical pen strokes of a glyph in a 100×100 box, each a polyline in
/// canonical drawing direction, listed in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Glyph {
    pub shape: &'static str,
    pub strokes: Vec<Vec<Point2>>,
    /// Index ranges of strokes belonging to each element, in element order.
    pub elements: Vec<std::ops::Range<usize>>,
}

fn poly(pts: &[(f64, f64)]) -> Vec<Point2> {
    pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()
}

pub const SHAPES: [&str; 8] = ["Ichi", "Two", "Three", "Ten", "Soil", "Craft", "Mouth", "Ancient"];

pub fn glyph(shape: &str) -> Option<Glyph> {
    let (shape, strokes, elements): (&'static str, Vec<Vec<Point2>>, Vec<std::ops::Range<usize>>) = match shape {
        "Ichi" => ("Ichi", vec![poly(&[(15.0, 50.0), (85.0, 50.0)])], vec![]),
        "Two" => (
            "Two",
            vec![poly(&[(32.0, 35.0), (68.0, 35.0)]), poly(&[(15.0, 70.0), (85.0, 70.0)])],
            vec![],
        ),
        "Three" => (
            "Three",
            vec![
                poly(&[(30.0, 25.0), (70.0, 25.0)]),
                poly(&[(35.0, 50.0), (65.0, 50.0)]),
                poly(&[(15.0, 78.0), (85.0, 78.0)]),
            ],
            vec![],
        ),
        "Ten" => (
            "Ten",
            vec![poly(&[(20.0, 50.0), (80.0, 50.0)]), poly(&[(50.0, 20.0), (50.0, 80.0)])],
            vec![],
        ),
        "Soil" => (
            "Soil",
            vec![
                poly(&[(32.0, 40.0), (68.0, 40.0)]),
                poly(&[(50.0, 15.0), (50.0, 85.0)]),
                poly(&[(15.0, 85.0), (85.0, 85.0)]),
            ],
            vec![],
        ),
        "Craft" => (
            "Craft",
            vec![
                poly(&[(32.0, 20.0), (68.0, 20.0)]),
                poly(&[(50.0, 20.0), (50.0, 80.0)]),
                poly(&[(15.0, 80.0), (85.0, 80.0)]),
            ],
            vec![],
        ),
        "Mouth" => (
            "Mouth",
            vec![
                poly(&[(25.0, 20.0), (25.0, 80.0)]),
                poly(&[(25.0, 20.0), (75.0, 20.0), (75.0, 80.0)]),
                poly(&[(25.0, 80.0), (75.0, 80.0)]),
            ],
            vec![],
        ),
        "Ancient" => (
            "Ancient",
            vec![
                poly(&[(15.0, 27.5), (85.0, 27.5)]),
                poly(&[(50.0, 5.0), (50.0, 50.0)]),
                poly(&[(32.0, 50.0), (32.0, 90.0)]),
                poly(&[(32.0, 50.0), (68.0, 50.0), (68.0, 90.0)]),
                poly(&[(32.0, 90.0), (68.0, 90.0)]),
            ],
            vec![0..2, 2..5],
        ),
        _ => return None,
    };
    Some(Glyph { shape, strokes, elements })
}

/// How a glyph is drawn: which canonical stroke goes down when, and
/// which strokes are traced backwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawSpec {
    pub order: Vec<usize>,
    pub reversed: Vec<bool>,
}

impl DrawSpec {
    pub fn canonical(n: usize) -> Self {
        DrawSpec {
            order: (0..n).collect(),
            reversed: vec![false; n],
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &s)| i == s) && self.reversed.iter().all(|r| !r)
    }

    /// Short tag such as `o102-r010`.
    pub fn tag(&self) -> String {
        let o: String = self.order.iter().map(|i| char::from_digit(*i as u32, 36).unwrap_or('?')).collect();
        let r: String = self.reversed.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("o{o}-r{r}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub scale: f64,
    pub offset: (f64, f64),
    /// Distance between samples, in output units.
    pub spacing: f64,
    pub dt_ms: u64,
    /// Sample interval near an interior vertex; the pen slows in corners.
    pub corner_dt_ms: u64,
    pub pause_ms: u64,
    /// Gaussian positional noise, as a fraction of the clean box diagonal.
    pub jitter_frac: f64,
    pub seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            scale: 1.0,
            offset: (0.0, 0.0),
            spacing: 2.0,
            dt_ms: 10,
            corner_dt_ms: 30,
            pause_ms: 300,
            jitter_frac: 0.0,
            seed: 0,
        }
    }
}

/// Samples a polyline at roughly uniform spacing, keeping every vertex.
/// Returns the samples and the indices of interior vertices.
pub fn sample_polyline(vertices: &[Point2], opts: &RenderOptions, t0: u64) -> (Vec<InkPoint>, Vec<usize>) {
    let mut raw: Vec<Point2> = vec![vertices[0]];
    let mut corner_idx = Vec::new();
    for (k, w) in vertices.windows(2).enumerate() {
        let n = ((w[0].distance(w[1]) / opts.spacing).ceil() as usize).max(1);
        for i in 1..=n {
            let f = i as f64 / n as f64;
            raw.push(Point2::new(w[0].x + (w[1].x - w[0].x) * f, w[0].y + (w[1].y - w[0].y) * f));
        }
        if k + 2 < vertices.len() {
            corner_idx.push(raw.len() - 1);
        }
    }
    let near_corner = |i: usize| corner_idx.iter().any(|&c| c.abs_diff(i) <= 3);
    let mut t = t0;
    let pts = raw
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i > 0 {
                t += if near_corner(i) { opts.corner_dt_ms } else { opts.dt_ms };
            }
            InkPoint::new(p.x, p.y, t)
        })
        .collect();
    (pts, corner_idx)
}

fn add_jitter(points: &mut [InkPoint], sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    for p in points {
        p.x += normal.sample(rng);
        p.y += normal.sample(rng);
    }
}

/// Renders `glyph` drawn according to `spec`.
pub fn render(glyph: &Glyph, spec: &DrawSpec, opts: &RenderOptions) -> Sketch {
    let place = |p: &Point2| Point2::new(p.x * opts.scale + opts.offset.0, p.y * opts.scale + opts.offset.1);
    let clean_diag = {
        let pts: Vec<InkPoint> = glyph.strokes.iter().flatten().map(|p| { let q = place(p); InkPoint::new(q.x, q.y, 0) }).collect();
        BoundingBox::of_points(&pts).map(|b| b.diagonal()).unwrap_or(0.0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut strokes = Vec::new();
    let mut t = 0u64;
    for (id, &si) in spec.order.iter().enumerate() {
        let mut verts: Vec<Point2> = glyph.strokes[si].iter().map(place).collect();
        if spec.reversed[si] {
            verts.reverse();
        }
        let (mut pts, _) = sample_polyline(&verts, opts, t);
        add_jitter(&mut pts, opts.jitter_frac * clean_diag, &mut rng);
        t = pts.last().map(|p| p.t).unwrap_or(t) + opts.pause_ms;
        strokes.push(InkStroke::new(id, pts));
    }
    let w = (100.0 * opts.scale + opts.offset.0).max(1.0);
    let h = (100.0 * opts.scale + opts.offset.1).max(1.0);
    Sketch::new(strokes, w, h).expect("generated ink is well formed")
}

pub fn render_canonical(shape: &str) -> Option<Sketch> {
    let g = glyph(shape)?;
    let spec = DrawSpec::canonical(g.strokes.len());
    Some(render(&g, &spec, &RenderOptions::default()))
}

/// A random right-angle stroke with its ground-truth corner position.
#[derive(Debug, Clone)]
pub struct RightAngleSample {
    pub stroke: InkStroke,
    pub corner: Point2,
    pub box_diagonal: f64,
}

/// Legs of 40–120 units at a random rotation and turn direction, with
/// jitter σ = `jitter_frac` of the clean box diagonal.
pub fn right_angle_sample(rng: &mut ChaCha8Rng, jitter_frac: f64) -> RightAngleSample {
    let l1: f64 = rng.random_range(40.0..120.0);
    let l2: f64 = rng.random_range(40.0..120.0);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let turn = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let origin = Point2::new(200.0, 200.0);
    let (c, s) = (theta.cos(), theta.sin());
    let corner = Point2::new(origin.x + l1 * c, origin.y + l1 * s);
    let end = Point2::new(corner.x - turn * l2 * s, corner.y + turn * l2 * c);
    let verts = [origin, corner, end];
    let opts = RenderOptions::default();
    let (mut pts, _) = sample_polyline(&verts, &opts, 0);
    let clean: Vec<InkPoint> = verts.iter().map(|p| InkPoint::new(p.x, p.y, 0)).collect();
    let diag = BoundingBox::of_points(&clean).map(|b| b.diagonal()).unwrap_or(0.0);
    add_jitter(&mut pts, jitter_frac * diag, rng);
    RightAngleSample {
        stroke: InkStroke::new(0, pts),
        corner,
        box_diagonal: diag,
    }
}

/// A straight stroke of random length and angle.
pub fn straight_sample(rng: &mut ChaCha8Rng) -> InkStroke {
    let len: f64 = rng.random_range(20.0..200.0);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let a = Point2::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
    let b = Point2::new(a.x + len * theta.cos(), a.y + len * theta.sin());
    let (pts, _) = sample_polyline(&[a, b], &RenderOptions::default(), 0);
    InkStroke::new(0, pts)
}

/// One generated corpus sample.
#[derive(Debug, Clone)]
pub struct CorpusSample {
    pub stem: String,
    pub shape: &'static str,
    pub spec: DrawSpec,
    pub sketch: Sketch,
}

impl CorpusSample {
    pub fn technique_correct(&self) -> bool {
        self.spec.is_canonical()
    }
}

fn all_orders(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            go(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

fn all_reversals(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n).map(|m| (0..n).map(|i| m >> i & 1 == 1).collect()).collect()
}

/// Draw specs for the labeled corpus: every order × direction for glyphs
/// of up to three strokes, and a fixed mutation set for 古.
pub fn corpus_specs(shape: &str) -> Vec<DrawSpec> {
    let Some(g) = glyph(shape) else { return Vec::new() };
    let n = g.strokes.len();
    if n <= 3 {
        let mut specs = Vec::new();
        for order in all_orders(n) {
            for reversed in all_reversals(n) {
                specs.push(DrawSpec { order: order.clone(), reversed });
            }
        }
        return specs;
    }
    let mut specs = vec![DrawSpec::canonical(n)];
    for i in 0..n {
        let mut s = DrawSpec::canonical(n);
        s.reversed[i] = true;
        specs.push(s);
    }
    for i in 0..n - 1 {
        let mut s = DrawSpec::canonical(n);
        s.order.swap(i, i + 1);
        specs.push(s);
    }
    // Elements swapped: the mouth before the ten.
    let mut s = DrawSpec::canonical(n);
    s.order = g.elements.iter().rev().flat_map(|r| r.clone()).collect();
    specs.push(s);
    specs
}

/// Placements each spec is rendered at: (scale, offset).
const PLACEMENTS: [(f64, (f64, f64)); 2] = [(4.0, (0.0, 0.0)), (2.5, (120.0, 60.0))];

/// The labeled corpus over 一/十/口/古, in a fixed order. Noise-free.
pub fn labeled_corpus() -> Vec<CorpusSample> {
    let mut out = Vec::new();
    for shape in ["Ichi", "Ten", "Mouth", "Ancient"] {
        let g = glyph(shape).expect("shipped glyph");
        for spec in corpus_specs(shape) {
            for (pi, &(scale, offset)) in PLACEMENTS.iter().enumerate() {
                let opts = RenderOptions {
                    scale,
                    offset,
                    spacing: 2.0 * scale,
                    ..RenderOptions::default()
                };
                out.push(CorpusSample {
                    stem: format!("{}_{}_p{pi}", shape.to_lowercase(), spec.tag()),
                    shape: g.shape,
                    sketch: render(&g, &spec, &opts),
                    spec: spec.clone(),
                });
            }
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
