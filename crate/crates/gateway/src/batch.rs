//! Batch evaluation over a labeled ink corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use hashigo_core::critic::{metrics_from_flags, OrderViolationKind, TechniqueReport};
use hashigo_core::ink::load_ink;
use hashigo_core::recognizer::{classify_sketch, FailureKind};
use hashigo_core::tutor::{grade, Engine, LessonItem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sidecar label `<stem>.label.json` next to `<stem>.ink`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleLabel {
    pub expected_shape: String,
    pub technique_correct: bool,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleRow {
    pub file: String,
    pub expected_shape: String,
    pub technique_label: bool,
    pub classified: Vec<String>,
    pub visual_matched: bool,
    pub failure_kind: Option<FailureKind>,
    /// Absent when the critic did not run.
    pub technique_pass: Option<bool>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionRow {
    pub expected: String,
    /// Top classification → count; `(none)` when nothing matched.
    pub classified: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Histograms {
    pub visual_failures: BTreeMap<String, usize>,
    pub technique_violations: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub profile: String,
    pub config_fingerprint: String,
    /// Ink files found, including skipped ones.
    pub corpus_size: usize,
    pub evaluated: usize,
    pub skipped: Vec<SkippedFile>,
    pub visual_accuracy: Option<f64>,
    pub technique_among_visual: Option<f64>,
    /// Share of `techniqueCorrect` labels among visually matched samples.
    pub label_technique_rate: Option<f64>,
    /// Share of visually matched samples whose verdict equals the label.
    pub label_agreement: Option<f64>,
    pub confusion: Vec<ConfusionRow>,
    pub histograms: Histograms,
    pub samples: Vec<SampleRow>,
}

const NONE: &str = "(none)";

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn violation_keys(r: &TechniqueReport) -> Vec<String> {
    let mut out = Vec::new();
    for v in &r.order_violations {
        out.push(
            match v.kind {
                OrderViolationKind::OutOfSequence => "order.outOfSequence",
                OrderViolationKind::SplitAcrossStrokes => "order.splitAcrossStrokes",
                OrderViolationKind::SubOrder => "order.subOrder",
                OrderViolationKind::JoinedStrokes => "order.joinedStrokes",
            }
            .to_string(),
        );
    }
    out.extend(r.direction_violations.iter().map(|_| "direction".to_string()));
    out.extend(r.element_violations.iter().map(|_| "element".to_string()));
    if !r.stroke_count_ok {
        out.push("strokeCount".into());
    }
    out
}

fn failure_key(kind: FailureKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Grades every `*.ink` file in `corpus_dir` with its sidecar label.
/// Files are visited in name order so reports are byte-stable.
pub fn batch_eval(corpus_dir: &Path, engine: &Engine, profile: &str) -> Result<EvalReport, BatchError> {
    let io_err = |source| BatchError::Io {
        path: corpus_dir.to_path_buf(),
        source,
    };
    let mut inks: Vec<PathBuf> = fs::read_dir(corpus_dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ink") && p.is_file())
        .collect();
    inks.sort();

    let mut skipped = Vec::new();
    let mut samples = Vec::new();
    for path in &inks {
        let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let label_path = path.with_file_name(format!("{stem}.label.json"));
        let label: SampleLabel = match fs::read_to_string(&label_path) {
            Err(_) => {
                skipped.push(SkippedFile {
                    file,
                    reason: "no label file".into(),
                });
                continue;
            }
            Ok(text) => match serde_json::from_str(&text) {
                Ok(l) => l,
                Err(e) => {
                    skipped.push(SkippedFile {
                        file,
                        reason: format!("bad label file: {e}"),
                    });
                    continue;
                }
            },
        };
        if engine.library.get(&label.expected_shape).is_none() {
            skipped.push(SkippedFile {
                file,
                reason: format!("label names unknown shape `{}`", label.expected_shape),
            });
            continue;
        }
        samples.push(grade_file(path, file, label, engine));
    }

    let flags: Vec<(bool, bool)> = samples
        .iter()
        .map(|s| (s.visual_matched, s.technique_pass == Some(true)))
        .collect();
    let m = metrics_from_flags(flags.iter().copied());
    let matched: Vec<&SampleRow> = samples.iter().filter(|s| s.visual_matched).collect();
    let label_ok = matched.iter().filter(|s| s.technique_label).count();
    let agree = matched
        .iter()
        .filter(|s| s.technique_pass == Some(s.technique_label))
        .count();

    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut hist = Histograms::default();
    for s in &samples {
        let top = s.classified.first().cloned().unwrap_or_else(|| NONE.to_string());
        *confusion.entry(s.expected_shape.clone()).or_default().entry(top).or_default() += 1;
        if let Some(k) = s.failure_kind {
            *hist.visual_failures.entry(failure_key(k)).or_default() += 1;
        }
        for v in &s.violations {
            *hist.technique_violations.entry(v.clone()).or_default() += 1;
        }
    }

    Ok(EvalReport {
        profile: profile.to_string(),
        config_fingerprint: engine.config.fingerprint(),
        corpus_size: inks.len(),
        evaluated: samples.len(),
        skipped,
        visual_accuracy: m.visual_accuracy,
        technique_among_visual: m.technique_among_visual,
        label_technique_rate: ratio(label_ok, matched.len()),
        label_agreement: ratio(agree, matched.len()),
        confusion: confusion
            .into_iter()
            .map(|(expected, classified)| ConfusionRow { expected, classified })
            .collect(),
        histograms: hist,
        samples,
    })
}

fn grade_file(path: &Path, file: String, label: SampleLabel, engine: &Engine) -> SampleRow {
    let mut row = SampleRow {
        file,
        expected_shape: label.expected_shape.clone(),
        technique_label: label.technique_correct,
        classified: Vec::new(),
        visual_matched: false,
        failure_kind: Some(FailureKind::InvalidInk),
        technique_pass: None,
        violations: Vec::new(),
    };
    let Ok(sketch) = fs::read(path).map_err(|e| e.to_string()).and_then(|b| load_ink(&b).map_err(|e| e.to_string()))
    else {
        return row;
    };
    let item = LessonItem {
        shape_name: label.expected_shape.clone(),
        display_glyph: label.expected_shape,
        meaning: String::new(),
    };
    let g = grade(&sketch, &item, engine);
    let cfg = &engine.config;
    row.classified = classify_sketch(&sketch, &cfg.segmenter, &engine.library, &cfg.tolerance)
        .map(|(c, _)| c)
        .unwrap_or_default();
    row.visual_matched = g.visual.matched;
    row.failure_kind = g.visual.failure.as_ref().map(|f| f.kind);
    if let Some(t) = &g.technique {
        row.technique_pass = Some(t.overall_pass);
        row.violations = violation_keys(t);
    }
    row
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.1}%", x * 100.0)).unwrap_or_else(|| "n/a".into())
}

/// Plain-text summary for terminals.
pub fn summary_table(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "profile {}  config {}", r.profile, &r.config_fingerprint[..12.min(r.config_fingerprint.len())]);
    let _ = writeln!(out, "corpus {}  evaluated {}  skipped {}", r.corpus_size, r.evaluated, r.skipped.len());
    let _ = writeln!(out, "visual accuracy          {}", pct(r.visual_accuracy));
    let _ = writeln!(out, "technique among visual   {}", pct(r.technique_among_visual));
    let _ = writeln!(out, "label technique rate     {}", pct(r.label_technique_rate));
    let _ = writeln!(out, "label agreement          {}", pct(r.label_agreement));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<12} {:>6} {:>8} {:>10}", "shape", "n", "visual", "technique");
    let mut per: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for s in &r.samples {
        let e = per.entry(&s.expected_shape).or_default();
        e.0 += 1;
        e.1 += s.visual_matched as usize;
        e.2 += (s.technique_pass == Some(true)) as usize;
    }
    for (shape, (n, v, t)) in per {
        let _ = writeln!(out, "{shape:<12} {n:>6} {v:>8} {t:>10}");
    }
    if !r.histograms.visual_failures.is_empty() || !r.histograms.technique_violations.is_empty() {
        let _ = writeln!(out);
        for (k, n) in r.histograms.visual_failures.iter().chain(&r.histograms.technique_violations) {
            let _ = writeln!(out, "{k:<28} {n:>6}");
        }
    }
    for s in &r.skipped {
        let _ = writeln!(out, "skipped {}: {}", s.file, s.reason);
    }
    out
}
