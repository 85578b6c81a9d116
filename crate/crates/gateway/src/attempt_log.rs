//! Append-only attempt log: one JSON record per line.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use hashigo_core::tutor::{grade, Attempt, Engine, LessonItem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LOG_FILE: &str = "attempts.ndjson";

/// One attempt, self-contained: the ink, both verdicts and the fingerprint
/// of the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttemptLogRecord {
    pub lesson_id: String,
    pub config_fingerprint: String,
    pub overall_pass: bool,
    #[serde(flatten)]
    pub attempt: Attempt,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path} line {line}: {message}")]
    Record { path: PathBuf, line: usize, message: String },
}

#[derive(Debug)]
pub struct AttemptLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl AttemptLog {
    /// Opens (creating if needed) the log inside `data_dir`.
    pub fn open(data_dir: &Path) -> Result<Self, LogError> {
        let io_err = |source| LogError::Io {
            path: data_dir.to_path_buf(),
            source,
        };
        fs::create_dir_all(data_dir).map_err(io_err)?;
        let path = data_dir.join(LOG_FILE);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| LogError::Io {
                path: path.clone(),
                source,
            })?;
        Ok(AttemptLog {
            path,
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one record as a single line. Concurrent appends never
    /// interleave.
    pub fn append(&self, record: &AttemptLogRecord) -> Result<(), LogError> {
        let mut line = serde_json::to_string(record).expect("records serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|source| LogError::Io {
                path: self.path.clone(),
                source,
            })
    }

    pub fn sync(&self) -> Result<(), LogError> {
        let file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.sync_all().map_err(|source| LogError::Io {
            path: self.path.clone(),
            source,
        })
    }
}

/// Reads every record; blank lines are ignored.
pub fn read_log(path: &Path) -> Result<Vec<AttemptLogRecord>, LogError> {
    let file = File::open(path).map_err(|source| LogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| LogError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| LogError::Record {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegradeSummary {
    pub records: usize,
    pub compared: usize,
    pub reproduced: usize,
    /// Records graded under a different configuration; not compared.
    pub other_config: usize,
    /// Positions (0-based) of compared records whose verdicts changed.
    pub mismatched: Vec<usize>,
}

/// Grades every logged sketch again and compares the verdicts with the
/// stored ones.
pub fn regrade(records: &[AttemptLogRecord], engine: &Engine) -> RegradeSummary {
    let fingerprint = engine.config.fingerprint();
    let mut summary = RegradeSummary {
        records: records.len(),
        compared: 0,
        reproduced: 0,
        other_config: 0,
        mismatched: Vec::new(),
    };
    for (i, rec) in records.iter().enumerate() {
        if rec.config_fingerprint != fingerprint {
            summary.other_config += 1;
            continue;
        }
        summary.compared += 1;
        let item = LessonItem {
            shape_name: rec.attempt.shape_name.clone(),
            display_glyph: rec.attempt.shape_name.clone(),
            meaning: String::new(),
        };
        let g = grade(&rec.attempt.sketch, &item, engine);
        if g.visual == rec.attempt.visual && g.technique == rec.attempt.technique {
            summary.reproduced += 1;
        } else {
            summary.mismatched.push(i);
        }
    }
    summary
}
