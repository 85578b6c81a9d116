//! Regenerates the labeled corpus and the CLI fixtures.
//!
//! Usage: cargo run -p hashigo-core --example gen_corpus -- [DATA_DIR]

use std::fs;
use std::path::{Path, PathBuf};

use hashigo_core::geometry::Point2;
use hashigo_core::ink::{save_ink, Sketch};
use hashigo_core::synth::{glyph, labeled_corpus, render, render_canonical, DrawSpec, RenderOptions};

fn write(path: &Path, body: &str) {
    fs::write(path, body).unwrap_or_else(|e| panic!("cannot write {}: {e}", path.display()));
}

fn fixtures() -> Vec<(&'static str, Sketch)> {
    let ten = glyph("Ten").unwrap();
    let opts = RenderOptions::default();
    let mut reversed_h = DrawSpec::canonical(2);
    reversed_h.reversed[0] = true;
    let v_first = DrawSpec { order: vec![1, 0], reversed: vec![false, false] };
    let mut shifted = ten.clone();
    shifted.strokes[1] = vec![Point2::new(68.0, 20.0), Point2::new(68.0, 80.0)];

    let ancient = glyph("Ancient").unwrap();
    let mouth_first = DrawSpec { order: vec![2, 3, 4, 0, 1], reversed: vec![false; 5] };

    vec![
        ("ten_canonical", render_canonical("Ten").unwrap()),
        ("ten_reversed_h", render(&ten, &reversed_h, &opts)),
        ("ten_v_first", render(&ten, &v_first, &opts)),
        ("ten_shifted", render(&shifted, &DrawSpec::canonical(2), &opts)),
        ("ichi_canonical", render_canonical("Ichi").unwrap()),
        ("mouth_canonical", render_canonical("Mouth").unwrap()),
        ("ancient_canonical", render_canonical("Ancient").unwrap()),
        ("ancient_mouth_first", render(&ancient, &mouth_first, &opts)),
        ("empty", Sketch::new(vec![], 100.0, 100.0).unwrap()),
    ]
}

fn main() {
    let data = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let corpus = data.join("corpus");
    let fixture_dir = data.join("fixtures");
    fs::create_dir_all(&corpus).unwrap();
    fs::create_dir_all(&fixture_dir).unwrap();

    let samples = labeled_corpus();
    for s in &samples {
        write(&corpus.join(format!("{}.ink", s.stem)), &save_ink(&s.sketch));
        let label = serde_json::json!({
            "expectedShape": s.shape,
            "techniqueCorrect": s.technique_correct(),
        });
        write(&corpus.join(format!("{}.label.json", s.stem)), &format!("{label}\n"));
    }
    for (name, sketch) in fixtures() {
        write(&fixture_dir.join(format!("{name}.ink")), &save_ink(&sketch));
    }
    println!("wrote {} corpus samples to {}", samples.len(), corpus.display());
}
