//! Brute-force reference recognizer for randomized equivalence checks.
//!
//! Predicates are re-derived here from their geometric definitions rather
//! than calling the engine, and every injective assignment × orientation is
//! enumerated.

#![allow(dead_code)]

use hashigo_core::ink::InkPoint;
use hashigo_core::segmenter::DrawnPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ANGLE_TOL: f64 = 20.0;
pub const POS_TOL: f64 = 0.08;
pub const SIZE_RATIO: f64 = 0.55;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arg {
    Line(usize),
    /// role: 0 = p1, 1 = p2, 2 = center
    Point(usize, u8),
}

#[derive(Debug, Clone)]
pub struct Case {
    pub n_lines: usize,
    pub constraints: Vec<(&'static str, Vec<Arg>)>,
    pub prims: Vec<DrawnPrimitive>,
}

const UNARY: [&str; 8] = [
    "Horizontal",
    "Vertical",
    "PosSlope",
    "NegSlope",
    "NotHorizontal",
    "NotVertical",
    "NotPosSlope",
    "NotNegSlope",
];
const POINT2: [&str; 7] = ["LeftOf", "RightOf", "Above", "Below", "SameX", "SameY", "Near"];
const LINE2: [&str; 3] = ["SameSize", "Longer", "Intersects"];

fn arg_text(a: Arg) -> String {
    match a {
        Arg::Line(i) => format!("l{i}"),
        Arg::Point(i, r) => format!("l{i}.{}", ["p1", "p2", "center"][r as usize]),
    }
}

impl Case {
    pub fn description(&self) -> String {
        let mut s = String::from("name: R\ncomponents:\n");
        for i in 0..self.n_lines {
            s += &format!("Line l{i}\n");
        }
        s += "constraints:\n";
        for (p, args) in &self.constraints {
            let a: Vec<String> = args.iter().map(|&a| arg_text(a)).collect();
            s += &format!("{p} {}\n", a.join(" "));
        }
        s
    }
}

/// Random description of `1..=max_lines` lines with 1–8 constraints, and a
/// primitive set of the same size (or off by one, occasionally), drawn on a
/// coarse grid so that constraints are often satisfiable.
pub fn random_case(rng: &mut ChaCha8Rng, min_lines: usize, max_lines: usize) -> Case {
    let n = rng.random_range(min_lines..=max_lines);
    let k = rng.random_range(1..=8);
    let mut constraints = Vec::new();
    for _ in 0..k {
        let line = |rng: &mut ChaCha8Rng| rng.random_range(0..n);
        let kind = rng.random_range(0..3);
        match kind {
            0 => constraints.push((UNARY[rng.random_range(0..UNARY.len())], vec![Arg::Line(line(rng))])),
            1 => {
                let p = POINT2[rng.random_range(0..POINT2.len())];
                let a = Arg::Point(line(rng), rng.random_range(0..3));
                let b = Arg::Point(line(rng), rng.random_range(0..3));
                constraints.push((p, vec![a, b]));
            }
            _ => {
                let p = LINE2[rng.random_range(0..LINE2.len())];
                constraints.push((p, vec![Arg::Line(line(rng)), Arg::Line(line(rng))]));
            }
        }
    }
    let m = match rng.random_range(0..10) {
        0 if n > 1 => n - 1,
        1 => n + 1,
        _ => n,
    };
    let grid = |rng: &mut ChaCha8Rng| rng.random_range(0..=4) as f64 * 25.0;
    let mut prims = Vec::new();
    let mut t = 0;
    for i in 0..m {
        let (ax, ay) = (grid(rng), grid(rng));
        let (mut bx, mut by) = (grid(rng), grid(rng));
        if (ax, ay) == (bx, by) {
            bx += 25.0;
            by += if rng.random_bool(0.5) { 25.0 } else { 0.0 };
        }
        let a = InkPoint::new(ax, ay, t);
        let b = InkPoint::new(bx, by, t + 100);
        t += 200;
        prims.push(DrawnPrimitive::new(i, 0, a, b));
    }
    Case {
        n_lines: n,
        constraints,
        prims,
    }
}

type Seg = ((f64, f64), (f64, f64));

fn angle(l: Seg) -> f64 {
    let (dx, dy) = (l.1 .0 - l.0 .0, l.0 .1 - l.1 .1);
    let mut d = dy.atan2(dx).to_degrees();
    if d < 0.0 {
        d += 180.0;
    }
    if d >= 180.0 {
        d -= 180.0;
    }
    d
}

fn len(l: Seg) -> f64 {
    (l.1 .0 - l.0 .0).hypot(l.1 .1 - l.0 .1)
}

fn point_seg(p: (f64, f64), s: Seg) -> f64 {
    let (ax, ay) = s.0;
    let (dx, dy) = (s.1 .0 - ax, s.1 .1 - ay);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((p.0 - ax) * dx + (p.1 - ay) * dy) / l2).clamp(0.0, 1.0) };
    (p.0 - (ax + t * dx)).hypot(p.1 - (ay + t * dy))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn seg_dist(s: Seg, u: Seg) -> f64 {
    let d1 = cross(s.0, s.1, u.0);
    let d2 = cross(s.0, s.1, u.1);
    let d3 = cross(u.0, u.1, s.0);
    let d4 = cross(u.0, u.1, s.1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_seg(s.0, u).min(point_seg(s.1, u)).min(point_seg(u.0, s)).min(point_seg(u.1, s))
}

/// Truth of one constraint given oriented segments for every line.
pub fn holds(pred: &str, args: &[Arg], lines: &[Seg], diag: f64) -> bool {
    let eps = POS_TOL * diag;
    let seg = |a: Arg| match a {
        Arg::Line(i) => lines[i],
        _ => unreachable!(),
    };
    let pt = |a: Arg| match a {
        Arg::Point(i, 0) => lines[i].0,
        Arg::Point(i, 1) => lines[i].1,
        Arg::Point(i, _) => ((lines[i].0 .0 + lines[i].1 .0) / 2.0, (lines[i].0 .1 + lines[i].1 .1) / 2.0),
        _ => unreachable!(),
    };
    let horizontal = |t: f64| t.min(180.0 - t) <= ANGLE_TOL;
    let vertical = |t: f64| (t - 90.0).abs() <= ANGLE_TOL;
    let pos = |t: f64| t > ANGLE_TOL && t < 90.0 - ANGLE_TOL;
    let neg = |t: f64| t > 90.0 + ANGLE_TOL && t < 180.0 - ANGLE_TOL;
    match pred {
        "Horizontal" => horizontal(angle(seg(args[0]))),
        "Vertical" => vertical(angle(seg(args[0]))),
        "PosSlope" => pos(angle(seg(args[0]))),
        "NegSlope" => neg(angle(seg(args[0]))),
        "NotHorizontal" => !horizontal(angle(seg(args[0]))),
        "NotVertical" => !vertical(angle(seg(args[0]))),
        "NotPosSlope" => !pos(angle(seg(args[0]))),
        "NotNegSlope" => !neg(angle(seg(args[0]))),
        "LeftOf" => pt(args[0]).0 <= pt(args[1]).0 - eps,
        "RightOf" => pt(args[0]).0 >= pt(args[1]).0 + eps,
        "Above" => pt(args[0]).1 <= pt(args[1]).1 - eps,
        "Below" => pt(args[0]).1 >= pt(args[1]).1 + eps,
        "SameX" => (pt(args[0]).0 - pt(args[1]).0).abs() <= eps,
        "SameY" => (pt(args[0]).1 - pt(args[1]).1).abs() <= eps,
        "Near" => {
            let (p, q) = (pt(args[0]), pt(args[1]));
            (p.0 - q.0).hypot(p.1 - q.1) <= eps
        }
        "SameSize" => {
            let (a, b) = (len(seg(args[0])), len(seg(args[1])));
            let (lo, hi) = (a.min(b), a.max(b));
            hi == 0.0 || lo / hi >= SIZE_RATIO
        }
        "Longer" => len(seg(args[0])) >= len(seg(args[1])) / SIZE_RATIO,
        "Intersects" => seg_dist(seg(args[0]), seg(args[1])) <= eps,
        other => panic!("unknown predicate {other}"),
    }
}

pub fn diagonal(prims: &[DrawnPrimitive]) -> f64 {
    let xs = prims.iter().flat_map(|p| [p.a.x, p.b.x]);
    let ys = prims.iter().flat_map(|p| [p.a.y, p.b.y]);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (x1 - x0).hypot(y1 - y0)
}

/// Whether any injective assignment of all primitives to all lines, with
/// any orientation per line, satisfies every constraint.
pub fn brute_force(case: &Case) -> bool {
    let n = case.n_lines;
    if case.prims.len() != n {
        return false;
    }
    let diag = diagonal(&case.prims);
    let segs: Vec<Seg> = case.prims.iter().map(|p| ((p.a.x, p.a.y), (p.b.x, p.b.y))).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut found = false;
    permute(&mut perm, 0, &mut |perm| {
        for mask in 0..1u32 << n {
            let lines: Vec<Seg> = (0..n)
                .map(|i| {
                    let s = segs[perm[i]];
                    if mask >> i & 1 == 1 {
                        (s.1, s.0)
                    } else {
                        s
                    }
                })
                .collect();
            if case.constraints.iter().all(|(p, a)| holds(p, a, &lines, diag)) {
                found = true;
                return true;
            }
        }
        false
    });
    found
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == v.len() {
        return f(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        if permute(v, k + 1, f) {
            v.swap(k, i);
            return true;
        }
        v.swap(k, i);
    }
    false
}

/// Checks a reported assignment against the reference predicates: lines in
/// description order as (p1, p2) positions.
pub fn assignment_holds(case: &Case, lines: &[Seg]) -> bool {
    let diag = diagonal(&case.prims);
    case.constraints.iter().all(|(p, a)| holds(p, a, lines, diag))
}
