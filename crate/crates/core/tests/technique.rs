mod support;

use hashigo_core::critic::{build_plan, OrderViolationKind, TechniqueReport};
use hashigo_core::dsl::{parse_description, validate_technique_plan, PlanWarning, ShapeLibrary};
use hashigo_core::ink::{InkPoint, Sketch};
use hashigo_core::recognizer::recognize_sketch;
use hashigo_core::synth::{corpus_specs, glyph, labeled_corpus, render, DrawSpec, RenderOptions};
use hashigo_core::tutor::grade;
use support::fixtures::{engine, fixture, item, library};

fn technique(sketch: &Sketch, shape: &str) -> TechniqueReport {
    let e = engine();
    let g = grade(sketch, &item(shape, "?"), &e);
    assert!(g.visual.matched, "{shape}: {:?}", g.visual.failure);
    g.technique.expect("technique runs after a visual match")
}

#[test]
fn ten_order_direction_matrix() {
    let e = engine();
    let g = glyph("Ten").unwrap();
    let specs = corpus_specs("Ten");
    assert_eq!(specs.len(), 8);
    let mut passing = Vec::new();
    for spec in &specs {
        let sketch = render(&g, spec, &RenderOptions::default());
        let out = grade(&sketch, &item("Ten", "十"), &e);
        assert!(out.visual.matched, "{}", spec.tag());
        if out.technique.unwrap().overall_pass {
            passing.push(spec.clone());
        }
    }
    assert_eq!(passing, [DrawSpec::canonical(2)]);
}

#[test]
fn vertical_first_is_an_order_error_only() {
    let r = technique(&fixture("ten_v_first"), "Ten");
    assert!(!r.overall_pass);
    assert!(r
        .order_violations
        .iter()
        .any(|v| v.ordinal == 1 && v.kind == OrderViolationKind::OutOfSequence && v.drawn_position == 2));
    assert!(r.direction_violations.is_empty());
}

#[test]
fn reversed_horizontal_is_a_direction_error_only() {
    let r = technique(&fixture("ten_reversed_h"), "Ten");
    assert!(r.order_violations.is_empty());
    assert_eq!(r.direction_violations.len(), 1);
    let d = &r.direction_violations[0];
    assert_eq!(d.ordinal, 1);
    assert_eq!(d.expected_first, "horzLine.p1");
    assert_eq!(d.observed_direction, "right-to-left");
    assert_eq!(d.expected_direction, "left-to-right");
}

fn retimed(s: &Sketch, f: impl Fn(u64) -> u64) -> Sketch {
    s.map_points(|p| InkPoint::new(p.x, p.y, f(p.t)))
}

/// Reports with element timestamps mapped back through `inv`.
fn normalized(mut r: TechniqueReport, inv: impl Fn(u64) -> u64) -> TechniqueReport {
    for v in &mut r.element_violations {
        for t in &mut v.offending_timestamps {
            *t = inv(*t);
        }
    }
    r
}

#[test]
fn critique_ignores_time_origin_and_speed() {
    let e = engine();
    for s in labeled_corpus().iter().step_by(3) {
        let it = item(s.shape, "?");
        let base = grade(&s.sketch, &it, &e);
        let shifted = grade(&retimed(&s.sketch, |t| t + 86_400_000), &it, &e);
        let slowed = grade(&retimed(&s.sketch, |t| t * 3), &it, &e);
        assert_eq!(base.visual.matched, shifted.visual.matched, "{}", s.stem);
        assert_eq!(base.visual.matched, slowed.visual.matched, "{}", s.stem);
        assert_eq!(base.critique.critique_panel, shifted.critique.critique_panel, "{}", s.stem);
        assert_eq!(base.critique.critique_panel, slowed.critique.critique_panel, "{}", s.stem);
        if let Some(r) = base.technique {
            assert_eq!(normalized(shifted.technique.unwrap(), |t| t - 86_400_000), r, "{}", s.stem);
            assert_eq!(normalized(slowed.technique.unwrap(), |t| t / 3), r, "{}", s.stem);
        }
    }
}

#[test]
fn overall_pass_iff_no_violations() {
    let e = engine();
    for s in labeled_corpus() {
        let r = grade(&s.sketch, &item(s.shape, "?"), &e).technique.unwrap();
        let clean = r.order_violations.is_empty()
            && r.direction_violations.is_empty()
            && r.element_violations.is_empty()
            && r.stroke_count_ok;
        assert_eq!(r.overall_pass, clean, "{}", s.stem);
        assert_eq!(r.overall_pass, s.technique_correct(), "{}", s.stem);
    }
}

#[test]
fn ancient_is_recognized_hierarchically() {
    let e = engine();
    let sketch = fixture("ancient_canonical");
    assert_eq!(sketch.strokes.len(), 5);
    let (v, seg) = recognize_sketch(&sketch, &e.config.segmenter, "Ancient", &e.library, &e.config.tolerance).unwrap();
    assert!(v.matched);
    assert_eq!(seg.primitives.len(), 6);
    let b = v.binding.unwrap();
    let spans: Vec<&str> = b.sub_shape_spans.keys().map(String::as_str).collect();
    assert_eq!(spans, ["mouth", "ten"]);
    assert_eq!(b.sub_shape_spans["ten"].len(), 2);
    assert_eq!(b.sub_shape_spans["mouth"].len(), 4);
    assert!(b.sub_shape_spans["ten"].is_disjoint(&b.sub_shape_spans["mouth"]));

    let r = technique(&sketch, "Ancient");
    assert!(r.overall_pass);
    assert_eq!((r.expected_strokes, r.drawn_strokes), (5, 5));
}

#[test]
fn ancient_plan_inherits_element_ordinals() {
    let lib = library();
    let plan = build_plan(lib.get("Ancient").unwrap(), &lib).unwrap();
    assert_eq!(plan.elements, ["ten", "mouth"]);
    let strokes: Vec<(u32, Vec<&str>)> =
        plan.strokes.iter().map(|s| (s.ordinal, s.lines.iter().map(String::as_str).collect())).collect();
    assert_eq!(
        strokes,
        [
            (1, vec!["ten.horzLine"]),
            (2, vec!["ten.vertLine"]),
            (3, vec!["mouth.leftLine"]),
            (4, vec!["mouth.topLine", "mouth.rightLine"]),
            (5, vec!["mouth.bottomLine"]),
        ]
    );
    let points: Vec<u32> = plan.points.iter().map(|p| p.ordinal).collect();
    assert_eq!(points, (1..=12).collect::<Vec<_>>());
}

#[test]
fn mouth_before_ten_is_an_element_error() {
    let r = technique(&fixture("ancient_mouth_first"), "Ancient");
    assert!(!r.overall_pass);
    assert_eq!(r.element_violations.len(), 1);
    assert_eq!(r.element_violations[0].element, "mouth");
    assert_eq!(r.element_violations[0].preceding, "ten");
    assert!(!r.element_violations[0].offending_timestamps.is_empty());
}

#[test]
fn plan_warnings() {
    let lib = library();
    assert!(validate_technique_plan(lib.get("Ten").unwrap(), &lib).is_empty());

    let bare = "name: Cross\ncomponents:\nLine h\nLine v\nconstraints:\nHorizontal h\nVertical v\nLeftOf h.p1 h.p2\nAbove v.p1 v.p2\n";
    let d = parse_description(bare).unwrap();
    let l = ShapeLibrary::from_descriptions(vec![d.clone()]).unwrap();
    let w = validate_technique_plan(&d, &l);
    assert_eq!(
        w,
        [
            PlanWarning::UncoveredLines { lines: vec!["h".into(), "v".into()] },
            PlanWarning::PointsAbsent,
        ]
    );

    let loose = "name: Pair\ncomponents:\nLine a\nLine b\nconstraints:\nSameSize a b\naliases:\nLine stroke1 a\nLine stroke2 b\nPoint point1 a.p1\nPoint point2 a.p2\nPoint point3 b.p1\nPoint point4 b.p2\n";
    let d = parse_description(loose).unwrap();
    let l = ShapeLibrary::from_descriptions(vec![d.clone()]).unwrap();
    assert_eq!(
        validate_technique_plan(&d, &l),
        [
            PlanWarning::RoleUnpinned { line: "a".into() },
            PlanWarning::RoleUnpinned { line: "b".into() },
        ]
    );
}
