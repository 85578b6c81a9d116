//! Lessons, grading, feedback panels and report cards.

mod lesson;
mod messages;

pub use lesson::{load_lessons, Lesson, LessonError, LessonItem, LessonMode};
pub use messages::{CatalogError, MessageCatalog, REQUIRED_KEYS};

use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::critic::{build_plan, critique, metrics_from_flags, OrderViolationKind, TechniqueMetrics, TechniqueReport};
use crate::dsl::ShapeLibrary;
use crate::ink::Sketch;
use crate::recognizer::{recognize_sketch, FailureKind, VisualFailure, VisualVerdict};

/// Immutable engine state shared by all sessions.
#[derive(Debug, Clone)]
pub struct Engine {
    pub library: ShapeLibrary,
    pub config: EngineConfig,
    pub catalog: MessageCatalog,
}

impl Engine {
    pub fn new(library: ShapeLibrary, config: EngineConfig, catalog: MessageCatalog) -> Self {
        Engine {
            library,
            config,
            catalog,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NextItem {
    pub shape_name: String,
    pub glyph: String,
}

impl From<&LessonItem> for NextItem {
    fn from(item: &LessonItem) -> Self {
        NextItem {
            shape_name: item.shape_name.clone(),
            glyph: item.display_glyph.clone(),
        }
    }
}

/// The feedback window: response, critique and comment panels plus the
/// upcoming prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Critique {
    pub response_panel: String,
    pub critique_panel: Vec<String>,
    pub comment_panel: String,
    pub next_item: Option<NextItem>,
    pub visual_matched: bool,
    pub overall_pass: bool,
    pub visual: VisualVerdict,
    pub technique: Option<TechniqueReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Attempt {
    pub session_id: String,
    pub item_index: usize,
    pub shape_name: String,
    pub sketch: Sketch,
    pub visual: VisualVerdict,
    pub technique: Option<TechniqueReport>,
    #[serde(rename = "timestampUTC")]
    pub timestamp_utc: String,
}

/// Outcome of grading one sketch, independent of any session.
#[derive(Debug, Clone, PartialEq)]
pub struct Grade {
    pub visual: VisualVerdict,
    pub technique: Option<TechniqueReport>,
    pub critique: Critique,
}

/// Structure first, then technique: the critic only runs on a visual match.
pub fn grade(sketch: &Sketch, item: &LessonItem, engine: &Engine) -> Grade {
    let cat = &engine.catalog;
    let glyph = || ("glyph", item.display_glyph.clone());
    let lib = &engine.library;
    let cfg = &engine.config;

    let engine_error = |detail: String| {
        let visual = VisualVerdict {
            matched: false,
            binding: None,
            failure: Some(VisualFailure {
                kind: FailureKind::InvalidInk,
                detail: vec![detail.clone()],
                expected_lines: 0,
                drawn_primitives: 0,
            }),
        };
        Grade {
            critique: Critique {
                response_panel: cat.render("response.engineError", &[glyph()]),
                critique_panel: vec![cat.render("critique.invalidInk", &[("detail", detail)])],
                comment_panel: cat.render("comment.engineError", &[]),
                next_item: None,
                visual_matched: false,
                overall_pass: false,
                visual: visual.clone(),
                technique: None,
            },
            visual,
            technique: None,
        }
    };

    let visual = match recognize_sketch(sketch, &cfg.segmenter, &item.shape_name, lib, &cfg.tolerance) {
        Ok((v, _)) => v,
        Err(e) => return engine_error(e.to_string()),
    };

    if !visual.matched {
        let mut rows = Vec::new();
        if let Some(f) = &visual.failure {
            match f.kind {
                FailureKind::StrokeCountMismatch => rows.push(cat.render(
                    "critique.strokeCountMismatch",
                    &[
                        ("expected", f.expected_lines.to_string()),
                        ("drawn", f.drawn_primitives.to_string()),
                        glyph(),
                    ],
                )),
                FailureKind::NoConsistentAssignment if f.detail.is_empty() => {
                    rows.push(cat.render("critique.noConsistentAssignment", &[glyph()]))
                }
                FailureKind::NoConsistentAssignment => {
                    for c in &f.detail {
                        rows.push(cat.render("critique.constraintMiss", &[("constraint", c.clone()), glyph()]));
                    }
                }
                FailureKind::InvalidInk => {
                    for d in &f.detail {
                        rows.push(cat.render("critique.invalidInk", &[("detail", d.clone())]));
                    }
                }
            }
        }
        return Grade {
            critique: Critique {
                response_panel: cat.render("response.noMatch", &[glyph()]),
                critique_panel: rows,
                comment_panel: cat.render("comment.noMatch", &[glyph()]),
                next_item: None,
                visual_matched: false,
                overall_pass: false,
                visual: visual.clone(),
                technique: None,
            },
            visual,
            technique: None,
        };
    }

    let desc = lib.get(&item.shape_name).expect("recognized shapes exist");
    let report = match build_plan(desc, lib) {
        Ok(plan) => match critique(visual.binding.as_ref().expect("matched verdicts carry a binding"), &plan, sketch) {
            Ok(r) => r,
            Err(e) => return engine_error(e.to_string()),
        },
        Err(e) => return engine_error(e.to_string()),
    };

    let rows = technique_rows(&report, cat);
    let (response, comment) = if report.overall_pass {
        (cat.render("response.correct", &[glyph()]), cat.render("comment.correct", &[glyph()]))
    } else {
        (
            cat.render("response.techniqueErrors", &[glyph()]),
            cat.render("comment.technique", &[glyph()]),
        )
    };
    let mut comment = comment;
    for k in &report.indeterminate_directions {
        comment.push(' ');
        comment.push_str(&cat.render("comment.indeterminate", &[("ordinal", k.to_string())]));
    }
    Grade {
        critique: Critique {
            response_panel: response,
            critique_panel: rows,
            comment_panel: comment,
            next_item: None,
            visual_matched: true,
            overall_pass: report.overall_pass,
            visual: visual.clone(),
            technique: Some(report.clone()),
        },
        visual,
        technique: Some(report),
    }
}

/// Critique-panel rows for a technique report, in a fixed order: stroke
/// order, direction, element sequence, stroke count.
pub fn technique_rows(report: &TechniqueReport, cat: &MessageCatalog) -> Vec<String> {
    let mut rows = Vec::new();
    for v in &report.order_violations {
        let key = match v.kind {
            OrderViolationKind::OutOfSequence => "critique.order.outOfSequence",
            OrderViolationKind::SplitAcrossStrokes => "critique.order.splitAcrossStrokes",
            OrderViolationKind::SubOrder => "critique.order.subOrder",
            OrderViolationKind::JoinedStrokes => "critique.order.joinedStrokes",
        };
        rows.push(cat.render(
            key,
            &[("ordinal", v.ordinal.to_string()), ("position", v.drawn_position.to_string())],
        ));
    }
    for v in &report.direction_violations {
        rows.push(cat.render(
            "critique.direction",
            &[
                ("ordinal", v.ordinal.to_string()),
                ("observed", v.observed_direction.clone()),
                ("expected", v.expected_direction.clone()),
            ],
        ));
    }
    for v in &report.element_violations {
        rows.push(cat.render(
            "critique.element",
            &[("element", v.element.clone()), ("preceding", v.preceding.clone())],
        ));
    }
    if !report.stroke_count_ok {
        rows.push(cat.render(
            "critique.strokeCount",
            &[
                ("expected", report.expected_strokes.to_string()),
                ("drawn", report.drawn_strokes.to_string()),
            ],
        ));
    }
    rows
}

/// Grades `sketch` as an attempt at `item` and stamps it as an Attempt.
pub fn grade_attempt(
    sketch: &Sketch,
    item_index: usize,
    lesson: &Lesson,
    engine: &Engine,
    session_id: &str,
    timestamp_utc: &str,
) -> Option<(Attempt, Critique)> {
    let item = lesson.items.get(item_index)?;
    let g = grade(sketch, item, engine);
    let attempt = Attempt {
        session_id: session_id.to_string(),
        item_index,
        shape_name: item.shape_name.clone(),
        sketch: sketch.clone(),
        visual: g.visual,
        technique: g.technique,
        timestamp_utc: timestamp_utc.to_string(),
    };
    Some((attempt, g.critique))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportRow {
    pub item_index: usize,
    pub shape_name: String,
    pub glyph: String,
    pub visual_ok: bool,
    pub technique_ok: bool,
    pub attempts_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportCard {
    pub lesson_id: String,
    pub per_item: Vec<ReportRow>,
    pub visual_accuracy: Option<f64>,
    pub technique_among_visual: Option<f64>,
}

impl ReportCard {
    pub fn from_rows(lesson_id: &str, per_item: Vec<ReportRow>) -> Self {
        let m: TechniqueMetrics = metrics_from_flags(per_item.iter().map(|r| (r.visual_ok, r.technique_ok)));
        ReportCard {
            lesson_id: lesson_id.to_string(),
            visual_accuracy: m.visual_accuracy,
            technique_among_visual: m.technique_among_visual,
            per_item,
        }
    }
}

/// One student's pass through a lesson. The cursor moves on after a
/// passing attempt or an explicit skip; failed attempts may be retried.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub lesson: Lesson,
    cursor: usize,
    attempts: Vec<Attempt>,
}

impl Session {
    pub fn new(id: impl Into<String>, lesson: Lesson) -> Self {
        Session {
            id: id.into(),
            lesson,
            cursor: 0,
            attempts: Vec::new(),
        }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn attempts(&self) -> &[Attempt] {
        &self.attempts
    }

    /// The item to draw now; `None` once the lesson is finished.
    pub fn next_prompt(&self) -> Option<&LessonItem> {
        self.lesson.items.get(self.cursor)
    }

    /// Skips to the following item.
    pub fn advance(&mut self) -> Option<&LessonItem> {
        if self.cursor < self.lesson.items.len() {
            self.cursor += 1;
        }
        self.next_prompt()
    }

    /// Grades a sketch against the current prompt. `None` when the lesson
    /// is already finished.
    pub fn submit(&mut self, sketch: &Sketch, engine: &Engine, timestamp_utc: &str) -> Option<(Attempt, Critique)> {
        let (attempt, mut critique) = grade_attempt(sketch, self.cursor, &self.lesson, engine, &self.id, timestamp_utc)?;
        if critique.overall_pass {
            self.cursor += 1;
        }
        critique.next_item = self.next_prompt().map(NextItem::from);
        self.attempts.push(attempt.clone());
        Some((attempt, critique))
    }

    /// One row per attempted item, judged by its latest attempt.
    pub fn report(&self) -> ReportCard {
        let mut rows: Vec<ReportRow> = Vec::new();
        for (index, item) in self.lesson.items.iter().enumerate() {
            let tries: Vec<&Attempt> = self.attempts.iter().filter(|a| a.item_index == index).collect();
            let Some(last) = tries.last() else { continue };
            rows.push(ReportRow {
                item_index: index,
                shape_name: item.shape_name.clone(),
                glyph: item.display_glyph.clone(),
                visual_ok: last.visual.matched,
                technique_ok: last.visual.matched && last.technique.as_ref().is_some_and(|t| t.overall_pass),
                attempts_used: tries.len(),
            });
        }
        ReportCard::from_rows(&self.lesson.id, rows)
    }
}
