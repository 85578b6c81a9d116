mod support;

use std::fs;

use hashigo_core::ink::{load_ink, save_ink, InkPoint, InkStroke, Sketch};
use hashigo_core::recognizer::{classify_sketch, incremental_status, FailureKind, IncrementalStatus};
use hashigo_core::segmenter::segment;
use hashigo_core::synth::{labeled_corpus, render_canonical, SHAPES};
use hashigo_core::tutor::{grade, load_lessons, LessonMode, Session};
use support::fixtures::{data, engine, fixture, item};

#[test]
fn grading_examples() {
    let e = engine();
    let ok = grade(&fixture("ten_canonical"), &item("Ten", "十"), &e).critique;
    assert_eq!(ok.response_panel, "Correct");
    assert!(ok.critique_panel.is_empty());
    assert!(ok.overall_pass);

    let rev = grade(&fixture("ten_reversed_h"), &item("Ten", "十"), &e).critique;
    assert_eq!(rev.response_panel, "Visually correct — technique errors");
    assert_eq!(rev.critique_panel, ["Stroke 1: drawn right-to-left; write left-to-right"]);

    let ichi = grade(&fixture("ichi_canonical"), &item("Ten", "十"), &e);
    let f = ichi.visual.failure.unwrap();
    assert_eq!(f.kind, FailureKind::StrokeCountMismatch);
    assert_eq!((f.expected_lines, f.drawn_primitives), (2, 1));
    assert_eq!(ichi.critique.critique_panel, ["Expected 2 line segments for 十 but found 1"]);
    assert_eq!(ichi.critique.response_panel, "Not recognized as 十");
    assert!(ichi.technique.is_none());

    let shifted = grade(&fixture("ten_shifted"), &item("Ten", "十"), &e);
    assert_eq!(shifted.visual.failure.unwrap().kind, FailureKind::NoConsistentAssignment);
    assert!(shifted.critique.critique_panel.iter().all(|r| r.starts_with("Shape check failed: ")));
}

#[test]
fn session_advances_on_pass_and_reports_attempted_items() {
    let e = engine();
    let lessons = load_lessons(&data().join("lessons"), &e.library).unwrap();
    assert_eq!(lessons.keys().collect::<Vec<_>>(), ["chapter1", "chapter2", "elements"]);
    assert_eq!(lessons["elements"].mode, LessonMode::Elements);

    let mut s = Session::new("s", lessons["chapter1"].clone());
    assert_eq!(s.next_prompt().unwrap().shape_name, "Ichi");
    let (_, c) = s.submit(&fixture("ten_canonical"), &e, "t0").unwrap();
    assert!(!c.visual_matched);
    assert_eq!(s.cursor(), 0);
    let (_, c) = s.submit(&fixture("ichi_canonical"), &e, "t1").unwrap();
    assert!(c.overall_pass);
    assert_eq!(c.next_item.unwrap().glyph, "十");
    let (_, c) = s.submit(&fixture("ten_v_first"), &e, "t2").unwrap();
    assert!(c.visual_matched && !c.overall_pass);
    assert_eq!(s.cursor(), 1);
    s.advance();
    s.advance();
    let (_, c) = s.submit(&fixture("ancient_canonical"), &e, "t3").unwrap();
    assert!(c.overall_pass && c.next_item.is_none());
    assert!(s.next_prompt().is_none());
    assert!(s.submit(&fixture("ancient_canonical"), &e, "t4").is_none());

    let r = s.report();
    let rows: Vec<(usize, bool, bool, usize)> =
        r.per_item.iter().map(|x| (x.item_index, x.visual_ok, x.technique_ok, x.attempts_used)).collect();
    assert_eq!(rows, [(0, true, true, 2), (1, true, false, 1), (3, true, true, 1)]);
    assert_eq!(r.visual_accuracy, Some(1.0));
    assert_eq!(r.technique_among_visual, Some(2.0 / 3.0));
}

#[test]
fn every_canonical_glyph_classifies_as_itself() {
    let e = engine();
    for shape in SHAPES {
        let sketch = render_canonical(shape).unwrap();
        let (names, _) = classify_sketch(&sketch, &e.config.segmenter, &e.library, &e.config.tolerance).unwrap();
        assert_eq!(names.first().map(String::as_str), Some(shape), "{names:?}");
    }
    let (names, _) =
        classify_sketch(&fixture("ancient_canonical"), &e.config.segmenter, &e.library, &e.config.tolerance).unwrap();
    assert_eq!(names, ["Ancient"]);
}

fn prims_of(sketch: &Sketch) -> Vec<hashigo_core::segmenter::DrawnPrimitive> {
    segment(sketch, &engine().config.segmenter).unwrap().primitives
}

#[test]
fn incremental_feedback() {
    let e = engine();
    let ten = fixture("ten_canonical");
    let status = |s: &Sketch| incremental_status(&prims_of(s), "Ten", &e.library, &e.config.tolerance).unwrap();
    let first = Sketch::new(ten.strokes[..1].to_vec(), ten.canvas_width, ten.canvas_height).unwrap();
    assert_eq!(status(&first), IncrementalStatus::Consistent);
    assert_eq!(status(&ten), IncrementalStatus::Complete);
    let diag: Vec<InkPoint> = (0..40).map(|i| InkPoint::new(20.0 + i as f64 * 1.5, 20.0 + i as f64 * 1.5, i * 10)).collect();
    let slash = Sketch::new(vec![InkStroke::new(0, diag)], 100.0, 100.0).unwrap();
    assert_eq!(status(&slash), IncrementalStatus::Inconsistent);
}

#[test]
fn shipped_corpus_matches_generator() {
    let dir = data().join("corpus");
    let samples = labeled_corpus();
    assert_eq!(fs::read_dir(&dir).unwrap().count(), samples.len() * 2);
    for s in &samples {
        let on_disk = fs::read_to_string(dir.join(format!("{}.ink", s.stem))).unwrap();
        assert_eq!(on_disk, save_ink(&s.sketch), "{}", s.stem);
        assert_eq!(load_ink(on_disk.as_bytes()).unwrap(), s.sketch);
        let label: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join(format!("{}.label.json", s.stem))).unwrap()).unwrap();
        assert_eq!(label["expectedShape"], s.shape);
        assert_eq!(label["techniqueCorrect"], s.technique_correct());
    }
}
