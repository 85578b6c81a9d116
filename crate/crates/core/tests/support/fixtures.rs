#![allow(dead_code)]

use std::path::PathBuf;

use hashigo_core::config::EngineConfig;
use hashigo_core::dsl::{load_library, ShapeLibrary};
use hashigo_core::ink::{load_ink, Sketch};
use hashigo_core::tutor::{Engine, LessonItem, MessageCatalog};

pub fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn library() -> ShapeLibrary {
    load_library(&data().join("shapes")).unwrap()
}

pub fn engine() -> Engine {
    Engine::new(library(), EngineConfig::default(), MessageCatalog::shipped())
}

pub fn fixture(stem: &str) -> Sketch {
    load_ink(&std::fs::read(data().join("fixtures").join(format!("{stem}.ink"))).unwrap()).unwrap()
}

pub fn item(shape: &str, glyph: &str) -> LessonItem {
    LessonItem {
        shape_name: shape.into(),
        display_glyph: glyph.into(),
        meaning: String::new(),
    }
}
