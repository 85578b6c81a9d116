//! Command-line front end. Every command except `serve` is a pure function
//! from arguments to an [`Outcome`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hashigo_core::config::EngineConfig;
use hashigo_core::constraint::ToleranceProfile;
use hashigo_core::dsl::{load_library, parse_description, validate_technique_plan, ShapeLibrary};
use hashigo_core::ink::load_ink;
use hashigo_core::recognizer::{classify_sketch, recognize_sketch, FailureKind, VisualVerdict};
use hashigo_core::tutor::{grade, load_lessons, Engine, Lesson, LessonItem, MessageCatalog};
use serde::Serialize;
use serde_json::json;

use crate::attempt_log::{read_log, regrade};
use crate::batch::{batch_eval, summary_table, SampleLabel};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_NO_MATCH: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_MISSING: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Default,
    Strict,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Default => "default",
            Profile::Strict => "strict",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hashigo", version, about = "Kanji sketch recognition and technique critique")]
pub struct Cli {
    /// Shape description directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub shapes: Option<PathBuf>,
    /// Lesson directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub lessons: Option<PathBuf>,
    /// Directory for the attempt log.
    #[arg(long, global = true, value_name = "DIR")]
    pub data: Option<PathBuf>,
    /// Engine config file (`key = value` lines).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Tolerance profile; overrides any profile set in the config file.
    #[arg(long, global = true, value_enum)]
    pub profile: Option<Profile>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check shape, lesson, ink, label, catalog and config files.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Classify an ink file against the shape library.
    Recognize { ink: PathBuf, shapes_dir: Option<PathBuf> },
    /// Grade an ink file as an attempt at one shape.
    Critique {
        ink: PathBuf,
        kanji: String,
        shapes_dir: Option<PathBuf>,
    },
    /// Grade a labeled corpus and report the aggregate metrics.
    BatchEval { corpus: PathBuf, shapes_dir: Option<PathBuf> },
    /// Re-grade an attempt log and compare with the stored verdicts.
    Regrade { log: PathBuf },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

pub const DEFAULT_SHAPES: &str = "data/shapes";
pub const DEFAULT_LESSONS: &str = "data/lessons";
pub const DEFAULT_DATA: &str = "hashigo-data";

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {}\n", message.into()),
        }
    }
}

fn require(path: &Path) -> Result<(), Outcome> {
    if path.exists() {
        Ok(())
    } else {
        Err(Outcome::fail(EXIT_MISSING, format!("no such file or directory: {}", path.display())))
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

impl Cli {
    pub fn shapes_dir(&self, positional: Option<&PathBuf>) -> PathBuf {
        positional
            .or(self.shapes.as_ref())
            .cloned()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_SHAPES))
    }

    pub fn lessons_dir(&self) -> PathBuf {
        self.lessons.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_LESSONS))
    }

    pub fn data_dir(&self) -> PathBuf {
        self.data.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_DATA))
    }

    pub fn engine_config(&self) -> Result<EngineConfig, Outcome> {
        let mut cfg = match &self.config {
            Some(path) => {
                require(path)?;
                let text = fs::read_to_string(path)
                    .map_err(|e| Outcome::fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
                EngineConfig::parse(&text).map_err(|e| Outcome::fail(EXIT_ERROR, format!("{}: {e}", path.display())))?
            }
            None => EngineConfig::default(),
        };
        if let Some(p) = self.profile {
            cfg.tolerance = ToleranceProfile::named(p.name()).expect("known profile");
        }
        Ok(cfg)
    }

    fn profile_name(&self) -> String {
        match (self.profile, &self.config) {
            (Some(p), _) => p.name().to_string(),
            (None, Some(path)) => path.display().to_string(),
            (None, None) => "default".to_string(),
        }
    }

    pub fn engine(&self, shapes_dir: &Path) -> Result<Engine, Outcome> {
        require(shapes_dir)?;
        let lib = load_library(shapes_dir).map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))?;
        Ok(Engine::new(lib, self.engine_config()?, MessageCatalog::shipped()))
    }
}

/// Runs any command but `serve`.
pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Validate { paths } => validate(cli, paths),
        Command::Recognize { ink, shapes_dir } => recognize(cli, ink, shapes_dir.as_ref()),
        Command::Critique { ink, kanji, shapes_dir } => critique(cli, ink, kanji, shapes_dir.as_ref()),
        Command::BatchEval { corpus, shapes_dir } => batch(cli, corpus, shapes_dir.as_ref()),
        Command::Regrade { log } => regrade_cmd(cli, log),
        Command::Serve { .. } => Err(Outcome::fail(EXIT_ERROR, "serve runs through the binary entry point")),
    };
    result.unwrap_or_else(|o| o)
}

fn load_sketch(path: &Path) -> Result<hashigo_core::ink::Sketch, Outcome> {
    require(path)?;
    let bytes = fs::read(path).map_err(|e| Outcome::fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
    load_ink(&bytes).map_err(|e| Outcome::fail(EXIT_ERROR, format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RecognizeOutput {
    classification: Vec<String>,
    stroke_count: usize,
    primitive_count: usize,
    /// Verdict for the top classification.
    verdict: Option<VisualVerdict>,
}

fn recognize(cli: &Cli, ink: &Path, shapes: Option<&PathBuf>) -> Result<Outcome, Outcome> {
    let sketch = load_sketch(ink)?;
    let engine = cli.engine(&cli.shapes_dir(shapes))?;
    let cfg = &engine.config;
    let (classification, seg) = classify_sketch(&sketch, &cfg.segmenter, &engine.library, &cfg.tolerance)
        .map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))?;
    let verdict = match classification.first() {
        Some(top) => Some(
            recognize_sketch(&sketch, &cfg.segmenter, top, &engine.library, &cfg.tolerance)
                .map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))?
                .0,
        ),
        None => None,
    };
    let out = RecognizeOutput {
        stroke_count: sketch.strokes.len(),
        primitive_count: seg.primitives.len(),
        classification,
        verdict,
    };
    let code = if out.classification.is_empty() { EXIT_NO_MATCH } else { EXIT_PASS };
    let text = if cli.json {
        to_json(&out)
    } else if out.classification.is_empty() {
        format!("no match ({} strokes, {} primitives)\n", out.stroke_count, out.primitive_count)
    } else {
        format!("{}\n", out.classification.join(" "))
    };
    Ok(Outcome::new(code, text))
}

/// Display glyph for a shape from the lesson files, if any lists it.
fn glyph_for(cli: &Cli, shape: &str, lib: &ShapeLibrary) -> Option<String> {
    let lessons = load_lessons(&cli.lessons_dir(), lib).ok()?;
    lessons
        .values()
        .flat_map(|l| l.items.iter())
        .find(|i| i.shape_name == shape)
        .map(|i| i.display_glyph.clone())
}

fn critique(cli: &Cli, ink: &Path, kanji: &str, shapes: Option<&PathBuf>) -> Result<Outcome, Outcome> {
    let sketch = load_sketch(ink)?;
    let engine = cli.engine(&cli.shapes_dir(shapes))?;
    if engine.library.get(kanji).is_none() {
        return Err(Outcome::fail(EXIT_ERROR, format!("unknown shape `{kanji}`")));
    }
    let item = LessonItem {
        shape_name: kanji.to_string(),
        display_glyph: glyph_for(cli, kanji, &engine.library).unwrap_or_else(|| kanji.to_string()),
        meaning: String::new(),
    };
    let g = grade(&sketch, &item, &engine);
    let c = &g.critique;
    let code = match (&g.visual.failure, c.visual_matched, c.overall_pass) {
        (_, true, true) => EXIT_PASS,
        (_, true, false) => EXIT_VIOLATIONS,
        (Some(f), false, _) if f.kind == FailureKind::InvalidInk => EXIT_ERROR,
        _ => EXIT_NO_MATCH,
    };
    let text = if cli.json {
        to_json(c)
    } else {
        let mut t = format!("{}\n", c.response_panel);
        for row in &c.critique_panel {
            let _ = writeln!(t, "  - {row}");
        }
        let _ = writeln!(t, "{}", c.comment_panel);
        t
    };
    Ok(Outcome::new(code, text))
}

fn batch(cli: &Cli, corpus: &Path, shapes: Option<&PathBuf>) -> Result<Outcome, Outcome> {
    require(corpus)?;
    let engine = cli.engine(&cli.shapes_dir(shapes))?;
    let report = batch_eval(corpus, &engine, &cli.profile_name()).map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))?;
    let mut out = Outcome::new(EXIT_PASS, if cli.json { to_json(&report) } else { summary_table(&report) });
    for s in &report.skipped {
        let _ = writeln!(out.stderr, "warning: skipped {}: {}", s.file, s.reason);
    }
    Ok(out)
}

fn regrade_cmd(cli: &Cli, log: &Path) -> Result<Outcome, Outcome> {
    require(log)?;
    let engine = cli.engine(&cli.shapes_dir(None))?;
    let records = read_log(log).map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))?;
    let summary = regrade(&records, &engine);
    let code = if summary.mismatched.is_empty() { EXIT_PASS } else { EXIT_VIOLATIONS };
    let text = if cli.json {
        to_json(&summary)
    } else {
        format!(
            "{} records, {} compared, {} reproduced, {} under another config, {} changed\n",
            summary.records,
            summary.compared,
            summary.reproduced,
            summary.other_config,
            summary.mismatched.len()
        )
    };
    Ok(Outcome::new(code, text))
}

#[derive(Debug, Default, Serialize)]
pub struct FileReport {
    pub path: String,
    pub kind: &'static str,
    pub ok: bool,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

fn file_kind(path: &Path) -> &'static str {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    if name.ends_with(".shape") {
        "shape"
    } else if name.ends_with(".lesson.json") {
        "lesson"
    } else if name.ends_with(".label.json") {
        "label"
    } else if name.ends_with(".ink") {
        "ink"
    } else if name == "messages.json" {
        "messages"
    } else if name.ends_with(".conf") {
        "config"
    } else {
        "unknown"
    }
}

/// Library used to check cross references: `--shapes` if it loads.
fn reference_library(cli: &Cli) -> Option<ShapeLibrary> {
    load_library(&cli.shapes_dir(None)).ok()
}

fn validate_shape_dir(dir: &Path, report: &mut FileReport) -> Option<ShapeLibrary> {
    match load_library(dir) {
        Ok(lib) => {
            for name in lib.names() {
                let desc = lib.get(name).expect("listed");
                for w in validate_technique_plan(desc, &lib) {
                    report.warnings.push(format!("{name}: {w}"));
                }
            }
            Some(lib)
        }
        Err(e) => {
            report.errors.push(e.to_string());
            None
        }
    }
}

fn validate_file(path: &Path, lib: Option<&ShapeLibrary>) -> FileReport {
    let kind = file_kind(path);
    let mut r = FileReport {
        path: path.display().to_string(),
        kind,
        ..FileReport::default()
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            r.errors.push(e.to_string());
            return r;
        }
    };
    match kind {
        "shape" => match parse_description(&text) {
            Err(e) => r.errors.push(e.to_string()),
            Ok(desc) => {
                // Check it in the context of the reference library, replacing
                // any description of the same name.
                let mut descs: Vec<_> = lib
                    .map(|l| {
                        l.names()
                            .filter(|n| *n != desc.name)
                            .filter_map(|n| l.get(n).cloned())
                            .collect()
                    })
                    .unwrap_or_default();
                descs.push(desc.clone());
                match ShapeLibrary::from_descriptions(descs) {
                    Ok(with) => {
                        r.warnings
                            .extend(validate_technique_plan(&desc, &with).iter().map(|w| w.to_string()));
                    }
                    Err(e) => r.errors.push(e.to_string()),
                }
            }
        },
        "lesson" => match Lesson::parse(&text) {
            Err(e) => r.errors.push(e.to_string()),
            Ok(lesson) => match lib {
                Some(lib) => {
                    if let Err(e) = lesson.validate(lib) {
                        r.errors.push(e.to_string());
                    }
                }
                None => r.warnings.push("no shape library available; shape names not checked".into()),
            },
        },
        "label" => {
            if let Err(e) = serde_json::from_str::<SampleLabel>(&text) {
                r.errors.push(e.to_string());
            }
        }
        "ink" => {
            if let Err(e) = load_ink(text.as_bytes()) {
                r.errors.push(e.to_string());
            }
        }
        "messages" => {
            if let Err(e) = MessageCatalog::parse(&text) {
                r.errors.push(e.to_string());
            }
        }
        "config" => {
            if let Err(e) = EngineConfig::parse(&text) {
                r.errors.push(e.to_string());
            }
        }
        _ => r.errors.push("unrecognized file type".into()),
    }
    r.ok = r.errors.is_empty();
    r
}

fn validate(cli: &Cli, paths: &[PathBuf]) -> Result<Outcome, Outcome> {
    for p in paths {
        require(p)?;
    }
    let reference = reference_library(cli);
    let mut reports = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Outcome::fail(EXIT_ERROR, format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.is_file())
                .collect();
            entries.sort();
            // A directory of shapes is checked as one library.
            let mut dir_lib = None;
            if entries.iter().any(|e| file_kind(e) == "shape") {
                let mut r = FileReport {
                    path: p.display().to_string(),
                    kind: "library",
                    ..FileReport::default()
                };
                dir_lib = validate_shape_dir(p, &mut r);
                r.ok = r.errors.is_empty();
                reports.push(r);
            }
            for e in entries.iter().filter(|e| file_kind(e) != "shape") {
                reports.push(validate_file(e, dir_lib.as_ref().or(reference.as_ref())));
            }
        } else {
            reports.push(validate_file(p, reference.as_ref()));
        }
    }
    let any_error = reports.iter().any(|r| !r.ok);
    let any_warning = reports.iter().any(|r| !r.warnings.is_empty());
    let code = if any_error {
        EXIT_ERROR
    } else if any_warning {
        EXIT_VIOLATIONS
    } else {
        EXIT_PASS
    };
    let text = if cli.json {
        to_json(&json!({ "ok": !any_error, "files": reports }))
    } else {
        let mut t = String::new();
        for r in &reports {
            let _ = writeln!(t, "{} {} ({})", if r.ok { "ok  " } else { "FAIL" }, r.path, r.kind);
            for e in &r.errors {
                let _ = writeln!(t, "    error: {e}");
            }
            for w in &r.warnings {
                let _ = writeln!(t, "    warning: {w}");
            }
        }
        t
    };
    Ok(Outcome::new(code, text))
}

/// Lessons for `serve`, checked against the engine's library.
pub fn lessons_for(cli: &Cli, lib: &ShapeLibrary) -> Result<BTreeMap<String, Lesson>, Outcome> {
    let dir = cli.lessons_dir();
    require(&dir)?;
    load_lessons(&dir, lib).map_err(|e| Outcome::fail(EXIT_ERROR, e.to_string()))
}
