//! Ink data model and the `.ink` JSON file format.
//!
//! A file looks like
//! `{"canvas":{"w":W,"h":H},"strokes":[{"id":0,"points":[[x,y,t],...]},...]}`.
//! Points are `[x, y, t]` triplets: pixel coordinates with y growing downward
//! and a timestamp in milliseconds since the sketch began.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InkError {
    #[error("malformed ink file: {0}")]
    Syntax(String),
    #[error("stroke {stroke}: {message}")]
    BadStroke { stroke: usize, message: String },
    #[error("stroke {stroke}, point {point}: {message}")]
    BadPoint {
        stroke: usize,
        point: usize,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("sketch contains no ink samples")]
    Empty,
}

/// One timestamped pen sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InkPoint {
    pub x: f64,
    pub y: f64,
    pub t: u64,
}

impl InkPoint {
    pub fn new(x: f64, y: f64, t: u64) -> Self {
        InkPoint { x, y, t }
    }

    pub fn distance(&self, other: &InkPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One pen-down to pen-up trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InkStroke {
    pub id: usize,
    pub points: Vec<InkPoint>,
}

impl InkStroke {
    pub fn new(id: usize, points: Vec<InkPoint>) -> Self {
        InkStroke { id, points }
    }

    pub fn start_time(&self) -> u64 {
        self.points.first().map(|p| p.t).unwrap_or(0)
    }

    pub fn end_time(&self) -> u64 {
        self.points.last().map(|p| p.t).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sketch {
    pub strokes: Vec<InkStroke>,
    pub canvas_width: f64,
    pub canvas_height: f64,
}

/// Axis-aligned rectangle in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    fn include(&mut self, p: &InkPoint) {
        self.min_x = self.min_x.min(p.x);
        self.min_y = self.min_y.min(p.y);
        self.max_x = self.max_x.max(p.x);
        self.max_y = self.max_y.max(p.y);
    }

    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a InkPoint>) -> Result<Self, InkError> {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(InkError::Empty)?;
        let mut bb = BoundingBox {
            min_x: first.x,
            min_y: first.y,
            max_x: first.x,
            max_y: first.y,
        };
        for p in iter {
            bb.include(p);
        }
        Ok(bb)
    }
}

impl Sketch {
    /// Builds a sketch and checks every invariant.
    pub fn new(strokes: Vec<InkStroke>, canvas_width: f64, canvas_height: f64) -> Result<Self, InkError> {
        let sketch = Sketch {
            strokes,
            canvas_width,
            canvas_height,
        };
        sketch.validate()?;
        Ok(sketch)
    }

    pub fn empty(canvas_width: f64, canvas_height: f64) -> Self {
        Sketch {
            strokes: Vec::new(),
            canvas_width,
            canvas_height,
        }
    }

    pub fn validate(&self) -> Result<(), InkError> {
        if !(self.canvas_width.is_finite() && self.canvas_height.is_finite())
            || self.canvas_width < 0.0
            || self.canvas_height < 0.0
        {
            return Err(InkError::Validation("canvas size must be finite and non-negative".into()));
        }
        for (i, stroke) in self.strokes.iter().enumerate() {
            validate_stroke(stroke)?;
            if stroke.id != i {
                return Err(InkError::BadStroke {
                    stroke: i,
                    message: format!("stroke ids must be dense in pen-down order, found id {}", stroke.id),
                });
            }
        }
        for pair in self.strokes.windows(2) {
            if pair[1].start_time() < pair[0].start_time() {
                return Err(InkError::Validation(format!(
                    "stroke {} starts at {} ms, before stroke {} at {} ms",
                    pair[1].id,
                    pair[1].start_time(),
                    pair[0].id,
                    pair[0].start_time()
                )));
            }
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.strokes.iter().map(|s| s.points.len()).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &InkPoint> {
        self.strokes.iter().flat_map(|s| s.points.iter())
    }

    /// Smallest axis-aligned rectangle containing every sample.
    pub fn bounding_box(&self) -> Result<BoundingBox, InkError> {
        BoundingBox::of_points(self.points())
    }

    /// Appends a stroke, renumbering it to the next dense id.
    pub fn push_stroke(&mut self, mut stroke: InkStroke) -> Result<(), InkError> {
        stroke.id = self.strokes.len();
        validate_stroke(&stroke)?;
        if let Some(last) = self.strokes.last() {
            if stroke.start_time() < last.start_time() {
                return Err(InkError::Validation(format!(
                    "stroke starts at {} ms, before previous stroke at {} ms",
                    stroke.start_time(),
                    last.start_time()
                )));
            }
        }
        self.strokes.push(stroke);
        Ok(())
    }

    /// Returns a copy with every coordinate mapped through `f`.
    pub fn map_points(&self, f: impl Fn(&InkPoint) -> InkPoint) -> Sketch {
        Sketch {
            strokes: self
                .strokes
                .iter()
                .map(|s| InkStroke::new(s.id, s.points.iter().map(&f).collect()))
                .collect(),
            canvas_width: self.canvas_width,
            canvas_height: self.canvas_height,
        }
    }
}

fn validate_stroke(stroke: &InkStroke) -> Result<(), InkError> {
    if stroke.points.len() < 2 {
        return Err(InkError::BadStroke {
            stroke: stroke.id,
            message: format!("needs at least 2 points, found {}", stroke.points.len()),
        });
    }
    for (j, p) in stroke.points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(InkError::BadPoint {
                stroke: stroke.id,
                point: j,
                message: "coordinates must be finite".into(),
            });
        }
    }
    for (j, pair) in stroke.points.windows(2).enumerate() {
        if pair[1].t < pair[0].t {
            return Err(InkError::Validation(format!(
                "stroke {} point {}: timestamp {} precedes previous {}",
                stroke.id,
                j + 1,
                pair[1].t,
                pair[0].t
            )));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Canvas {
    w: f64,
    h: f64,
}

#[derive(Serialize)]
struct StrokeOut {
    id: usize,
    points: Vec<(f64, f64, u64)>,
}

#[derive(Serialize)]
struct InkFileOut {
    canvas: Canvas,
    strokes: Vec<StrokeOut>,
}

#[derive(Deserialize)]
struct InkFileIn {
    canvas: Canvas,
    strokes: Vec<Value>,
}

/// Parses one stroke object of the ink format. `index` is used for error
/// messages only.
pub fn parse_stroke_value(value: &Value, index: usize) -> Result<InkStroke, InkError> {
    let obj = value.as_object().ok_or_else(|| InkError::BadStroke {
        stroke: index,
        message: "expected an object".into(),
    })?;
    let id = obj
        .get("id")
        .and_then(Value::as_u64)
        .ok_or_else(|| InkError::BadStroke {
            stroke: index,
            message: "missing or non-integer \"id\"".into(),
        })? as usize;
    let raw = obj
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| InkError::BadStroke {
            stroke: index,
            message: "missing \"points\" array".into(),
        })?;
    let mut points = Vec::with_capacity(raw.len());
    for (j, item) in raw.iter().enumerate() {
        let bad = |message: &str| InkError::BadPoint {
            stroke: index,
            point: j,
            message: message.into(),
        };
        let triplet = item.as_array().ok_or_else(|| bad("expected [x, y, t]"))?;
        if triplet.len() != 3 {
            return Err(bad("expected exactly 3 values [x, y, t]"));
        }
        let x = triplet[0].as_f64().ok_or_else(|| bad("x is not a number"))?;
        let y = triplet[1].as_f64().ok_or_else(|| bad("y is not a number"))?;
        let t = match &triplet[2] {
            Value::Number(n) => n
                .as_u64()
                .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0).map(|f| f as u64))
                .ok_or_else(|| bad("t must be a non-negative integer"))?,
            _ => return Err(bad("t is not a number")),
        };
        points.push(InkPoint { x, y, t });
    }
    let stroke = InkStroke { id, points };
    validate_stroke(&InkStroke { id: index, ..stroke.clone() })?;
    Ok(stroke)
}

/// Parses and validates an ink file.
pub fn load_ink(bytes: &[u8]) -> Result<Sketch, InkError> {
    let file: InkFileIn = serde_json::from_slice(bytes).map_err(|e| InkError::Syntax(e.to_string()))?;
    let strokes = file
        .strokes
        .iter()
        .enumerate()
        .map(|(i, v)| parse_stroke_value(v, i))
        .collect::<Result<Vec<_>, _>>()?;
    Sketch::new(strokes, file.canvas.w, file.canvas.h)
}

/// Canonical serialization: field order as in the file format, compact JSON.
pub fn save_ink(sketch: &Sketch) -> String {
    let out = InkFileOut {
        canvas: Canvas {
            w: sketch.canvas_width,
            h: sketch.canvas_height,
        },
        strokes: sketch
            .strokes
            .iter()
            .map(|s| StrokeOut {
                id: s.id,
                points: s.points.iter().map(|p| (p.x, p.y, p.t)).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&out).expect("ink serialization cannot fail")
}
