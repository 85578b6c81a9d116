//! Recognition and written-technique critique for sketched kanji.
//!
//! Pipeline: ink → [`segmenter`] → [`recognizer`] (visual structure) →
//! [`critic`] (stroke order, direction, count, element sequence) →
//! [`tutor`] feedback.

pub mod config;
pub mod constraint;
pub mod critic;
pub mod dsl;
pub mod geometry;
pub mod ink;
pub mod recognizer;
pub mod segmenter;
pub mod synth;
pub mod tutor;
