//! Geometric predicates over lines and landmarks.
//!
//! All position tolerances scale with the sketch bounding-box diagonal, so
//! every predicate is invariant under uniform translation and positive
//! scaling of the ink.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ConstraintDecl, RefPath};
use crate::geometry::{segment_distance, Point2};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{predicate}` expects {expected} argument(s), got {found}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {index} of `{predicate}` must be a {expected}")]
    ArgKind {
        predicate: String,
        index: usize,
        expected: ArgKind,
    },
    #[error("reference `{0}` does not resolve")]
    Unresolved(String),
    #[error("landmark `{0}` carries no timestamp")]
    Untimed(String),
    #[error("invalid tolerance profile: {0}")]
    Tolerance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub angle_tol_deg: f64,
    pub pos_tol_frac: f64,
    pub size_ratio_min: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            angle_tol_deg: 20.0,
            pos_tol_frac: 0.08,
            size_ratio_min: 0.55,
        }
    }
}

impl ToleranceProfile {
    pub fn strict() -> Self {
        ToleranceProfile {
            angle_tol_deg: 12.0,
            pos_tol_frac: 0.05,
            size_ratio_min: 0.7,
        }
    }

    pub fn named(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "strict" => Some(Self::strict()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.angle_tol_deg > 0.0 && self.angle_tol_deg < 45.0) {
            return Err(EvalError::Tolerance(format!("angle_deg {} not in (0, 45)", self.angle_tol_deg)));
        }
        if !(self.pos_tol_frac > 0.0 && self.pos_tol_frac < 0.5) {
            return Err(EvalError::Tolerance(format!("pos_frac {} not in (0, 0.5)", self.pos_tol_frac)));
        }
        if !(self.size_ratio_min > 0.0 && self.size_ratio_min <= 1.0) {
            return Err(EvalError::Tolerance(format!(
                "size_ratio_min {} not in (0, 1]",
                self.size_ratio_min
            )));
        }
        Ok(())
    }
}

/// Which endpoint role or the midpoint of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkRole {
    P1,
    P2,
    Center,
}

impl LandmarkRole {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "p1" => Some(LandmarkRole::P1),
            "p2" => Some(LandmarkRole::P2),
            "center" => Some(LandmarkRole::Center),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LandmarkRole::P1 => "p1",
            LandmarkRole::P2 => "p2",
            LandmarkRole::Center => "center",
        }
    }
}

impl fmt::Display for LandmarkRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point landmark. Endpoints carry the time of the ink sample they sit on;
/// centers carry none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub position: Point2,
    pub timestamp: Option<u64>,
}

impl Landmark {
    pub fn timed(position: Point2, t: u64) -> Self {
        Landmark {
            position,
            timestamp: Some(t),
        }
    }

    pub fn require_time(&self, name: &str) -> Result<u64, EvalError> {
        self.timestamp.ok_or_else(|| EvalError::Untimed(name.to_string()))
    }
}

/// A line whose endpoint roles have been fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedLine {
    pub p1: Landmark,
    pub p2: Landmark,
}

impl OrientedLine {
    pub fn center(&self) -> Landmark {
        Landmark {
            position: self.p1.position.midpoint(self.p2.position),
            timestamp: None,
        }
    }

    pub fn landmark(&self, role: LandmarkRole) -> Landmark {
        match role {
            LandmarkRole::P1 => self.p1,
            LandmarkRole::P2 => self.p2,
            LandmarkRole::Center => self.center(),
        }
    }

    pub fn length(&self) -> f64 {
        self.p1.position.distance(self.p2.position)
    }

    /// Undirected angle in degrees, `[0, 180)`, measured counter-clockwise
    /// from +x with y pointing up (screen y is flipped).
    pub fn angle_deg(&self) -> f64 {
        let dx = self.p2.position.x - self.p1.position.x;
        let dy = self.p1.position.y - self.p2.position.y;
        let mut deg = dy.atan2(dx).to_degrees();
        if deg < 0.0 {
            deg += 180.0;
        }
        if deg >= 180.0 {
            deg -= 180.0;
        }
        deg
    }
}

/// What a reference resolves to during evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolved {
    Point(Landmark),
    Line(OrientedLine),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgKind {
    Line,
    Point,
}

impl fmt::Display for ArgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgKind::Line => "line",
            ArgKind::Point => "point",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predicate {
    Horizontal,
    Vertical,
    PosSlope,
    NegSlope,
    NotHorizontal,
    NotVertical,
    NotPosSlope,
    NotNegSlope,
    LeftOf,
    RightOf,
    Above,
    Below,
    SameX,
    SameY,
    Near,
    SameSize,
    Longer,
    Intersects,
}

const LINE1: &[ArgKind] = &[ArgKind::Line];
const POINT2: &[ArgKind] = &[ArgKind::Point, ArgKind::Point];
const LINE2: &[ArgKind] = &[ArgKind::Line, ArgKind::Line];

impl Predicate {
    pub const ALL: [Predicate; 18] = [
        Predicate::Horizontal,
        Predicate::Vertical,
        Predicate::PosSlope,
        Predicate::NegSlope,
        Predicate::NotHorizontal,
        Predicate::NotVertical,
        Predicate::NotPosSlope,
        Predicate::NotNegSlope,
        Predicate::LeftOf,
        Predicate::RightOf,
        Predicate::Above,
        Predicate::Below,
        Predicate::SameX,
        Predicate::SameY,
        Predicate::Near,
        Predicate::SameSize,
        Predicate::Longer,
        Predicate::Intersects,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Horizontal => "Horizontal",
            Predicate::Vertical => "Vertical",
            Predicate::PosSlope => "PosSlope",
            Predicate::NegSlope => "NegSlope",
            Predicate::NotHorizontal => "NotHorizontal",
            Predicate::NotVertical => "NotVertical",
            Predicate::NotPosSlope => "NotPosSlope",
            Predicate::NotNegSlope => "NotNegSlope",
            Predicate::LeftOf => "LeftOf",
            Predicate::RightOf => "RightOf",
            Predicate::Above => "Above",
            Predicate::Below => "Below",
            Predicate::SameX => "SameX",
            Predicate::SameY => "SameY",
            Predicate::Near => "Near",
            Predicate::SameSize => "SameSize",
            Predicate::Longer => "Longer",
            Predicate::Intersects => "Intersects",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn arg_kinds(self) -> &'static [ArgKind] {
        use Predicate::*;
        match self {
            Horizontal | Vertical | PosSlope | NegSlope | NotHorizontal | NotVertical | NotPosSlope | NotNegSlope => {
                LINE1
            }
            LeftOf | RightOf | Above | Below | SameX | SameY | Near => POINT2,
            SameSize | Longer | Intersects => LINE2,
        }
    }

    pub fn arity(self) -> usize {
        self.arg_kinds().len()
    }

    /// True for predicates whose truth depends on which endpoint is p1.
    pub fn orders_points(self) -> bool {
        matches!(
            self,
            Predicate::LeftOf | Predicate::RightOf | Predicate::Above | Predicate::Below | Predicate::Near
        )
    }

    pub fn eval(self, args: &[Resolved], tol: &ToleranceProfile, box_diag: f64) -> Result<bool, EvalError> {
        let kinds = self.arg_kinds();
        if args.len() != kinds.len() {
            return Err(EvalError::Arity {
                predicate: self.name().into(),
                expected: kinds.len(),
                found: args.len(),
            });
        }
        let eps = tol.pos_tol_frac * box_diag;
        let line = |i: usize| match args[i] {
            Resolved::Line(l) => Ok(l),
            _ => Err(EvalError::ArgKind {
                predicate: self.name().into(),
                index: i,
                expected: ArgKind::Line,
            }),
        };
        let point = |i: usize| match args[i] {
            Resolved::Point(p) => Ok(p.position),
            _ => Err(EvalError::ArgKind {
                predicate: self.name().into(),
                index: i,
                expected: ArgKind::Point,
            }),
        };
        let a = tol.angle_tol_deg;
        use Predicate::*;
        Ok(match self {
            Horizontal => is_horizontal(line(0)?.angle_deg(), a),
            Vertical => is_vertical(line(0)?.angle_deg(), a),
            PosSlope => is_pos_slope(line(0)?.angle_deg(), a),
            NegSlope => is_neg_slope(line(0)?.angle_deg(), a),
            NotHorizontal => !is_horizontal(line(0)?.angle_deg(), a),
            NotVertical => !is_vertical(line(0)?.angle_deg(), a),
            NotPosSlope => !is_pos_slope(line(0)?.angle_deg(), a),
            NotNegSlope => !is_neg_slope(line(0)?.angle_deg(), a),
            LeftOf => point(0)?.x <= point(1)?.x - eps,
            RightOf => point(0)?.x >= point(1)?.x + eps,
            Above => point(0)?.y <= point(1)?.y - eps,
            Below => point(0)?.y >= point(1)?.y + eps,
            SameX => (point(0)?.x - point(1)?.x).abs() <= eps,
            SameY => (point(0)?.y - point(1)?.y).abs() <= eps,
            Near => point(0)?.distance(point(1)?) <= eps,
            SameSize => {
                let (l1, l2) = (line(0)?.length(), line(1)?.length());
                let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
                hi == 0.0 || lo / hi >= tol.size_ratio_min
            }
            Longer => line(0)?.length() >= line(1)?.length() / tol.size_ratio_min,
            Intersects => {
                let (l1, l2) = (line(0)?, line(1)?);
                segment_distance(l1.p1.position, l1.p2.position, l2.p1.position, l2.p2.position) <= eps
            }
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn is_horizontal(theta: f64, tol: f64) -> bool {
    theta.min(180.0 - theta) <= tol
}

fn is_vertical(theta: f64, tol: f64) -> bool {
    (theta - 90.0).abs() <= tol
}

fn is_pos_slope(theta: f64, tol: f64) -> bool {
    theta > tol && theta < 90.0 - tol
}

fn is_neg_slope(theta: f64, tol: f64) -> bool {
    theta > 90.0 + tol && theta < 180.0 - tol
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateInfo {
    pub name: &'static str,
    pub arity: usize,
    pub arg_kinds: &'static [ArgKind],
}

/// Every supported predicate, in a stable order.
pub fn predicate_table() -> Vec<PredicateInfo> {
    Predicate::ALL
        .iter()
        .map(|p| PredicateInfo {
            name: p.name(),
            arity: p.arity(),
            arg_kinds: p.arg_kinds(),
        })
        .collect()
}

/// Evaluates one declared constraint, resolving its references through
/// `resolve`. Unknown predicates are an error rather than `false`.
pub fn eval_constraint(
    c: &ConstraintDecl,
    resolve: impl Fn(&RefPath) -> Option<Resolved>,
    tol: &ToleranceProfile,
    box_diag: f64,
) -> Result<bool, EvalError> {
    let pred = Predicate::from_name(&c.predicate).ok_or_else(|| EvalError::UnknownPredicate(c.predicate.clone()))?;
    let args = c
        .args
        .iter()
        .map(|r| resolve(r).ok_or_else(|| EvalError::Unresolved(r.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    pred.eval(&args, tol, box_diag)
}
