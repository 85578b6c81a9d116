use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::ShapeLibrary;

#[derive(Debug, Error)]
pub enum LessonError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("lesson `{0}` has no items")]
    Empty(String),
    #[error("lesson `{lesson}` item {index} names unknown shape `{shape}`")]
    UnknownShape { lesson: String, index: usize, shape: String },
    #[error("lesson id `{0}` is used more than once")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LessonMode {
    Kanji,
    Elements,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LessonItem {
    pub shape_name: String,
    pub display_glyph: String,
    pub meaning: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lesson {
    pub id: String,
    pub title: String,
    pub mode: LessonMode,
    pub items: Vec<LessonItem>,
}

impl Lesson {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self, lib: &ShapeLibrary) -> Result<(), LessonError> {
        if self.items.is_empty() {
            return Err(LessonError::Empty(self.id.clone()));
        }
        for (index, item) in self.items.iter().enumerate() {
            if lib.get(&item.shape_name).is_none() {
                return Err(LessonError::UnknownShape {
                    lesson: self.id.clone(),
                    index,
                    shape: item.shape_name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Loads and validates every `*.lesson.json` in `dir`, keyed by id.
pub fn load_lessons(dir: &Path, lib: &ShapeLibrary) -> Result<BTreeMap<String, Lesson>, LessonError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LessonError::Io { path, source }
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".lesson.json")))
        .collect();
    paths.sort();
    let mut lessons = BTreeMap::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let lesson = Lesson::parse(&text).map_err(|source| LessonError::Json {
            path: path.clone(),
            source,
        })?;
        lesson.validate(lib)?;
        if lessons.contains_key(&lesson.id) {
            return Err(LessonError::DuplicateId(lesson.id));
        }
        lessons.insert(lesson.id.clone(), lesson);
    }
    Ok(lessons)
}
