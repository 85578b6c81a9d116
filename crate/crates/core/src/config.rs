//! Engine configuration: flat `key = value` files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constraint::ToleranceProfile;
use crate::segmenter::SegmenterConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` needs {expected}, got `{value}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EngineConfig {
    pub segmenter: SegmenterConfig,
    pub tolerance: ToleranceProfile,
}

impl EngineConfig {
    pub fn with_profile(name: &str) -> Option<Self> {
        Some(EngineConfig {
            tolerance: ToleranceProfile::named(name)?,
            ..Self::default()
        })
    }

    /// Parses a config file on top of the defaults. `tolerance.profile`
    /// resets all tolerances; later `tolerance.*` keys override it.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = EngineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |expected: &'static str| -> Result<f64, ConfigError> {
                value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ConfigError::BadValue {
                    line,
                    key: key.into(),
                    value: value.into(),
                    expected,
                })
            };
            match key {
                "tolerance.profile" => {
                    cfg.tolerance = ToleranceProfile::named(value).ok_or_else(|| ConfigError::BadValue {
                        line,
                        key: key.into(),
                        value: value.into(),
                        expected: "`default` or `strict`",
                    })?
                }
                "segmenter.smooth_window" => {
                    cfg.segmenter.smooth_window = value.parse().map_err(|_| ConfigError::BadValue {
                        line,
                        key: key.into(),
                        value: value.into(),
                        expected: "a positive integer",
                    })?
                }
                "segmenter.speed_ratio" => cfg.segmenter.speed_ratio = num("a number")?,
                "segmenter.curvature_min" => cfg.segmenter.curvature_min = num("a number")?,
                "segmenter.fit_tol_frac" => cfg.segmenter.fit_tol_frac = num("a number")?,
                "segmenter.min_seg_len_frac" => cfg.segmenter.min_seg_len_frac = num("a number")?,
                "tolerance.angle_deg" => cfg.tolerance.angle_tol_deg = num("a number")?,
                "tolerance.pos_frac" => cfg.tolerance.pos_tol_frac = num("a number")?,
                "tolerance.size_ratio_min" => cfg.tolerance.size_ratio_min = num("a number")?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.into(),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.segmenter.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.tolerance.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Canonical text; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let s = &self.segmenter;
        let t = &self.tolerance;
        let mut out = String::new();
        let _ = writeln!(out, "segmenter.smooth_window = {}", s.smooth_window);
        let _ = writeln!(out, "segmenter.speed_ratio = {:?}", s.speed_ratio);
        let _ = writeln!(out, "segmenter.curvature_min = {:?}", s.curvature_min);
        let _ = writeln!(out, "segmenter.fit_tol_frac = {:?}", s.fit_tol_frac);
        let _ = writeln!(out, "segmenter.min_seg_len_frac = {:?}", s.min_seg_len_frac);
        let _ = writeln!(out, "tolerance.angle_deg = {:?}", t.angle_tol_deg);
        let _ = writeln!(out, "tolerance.pos_frac = {:?}", t.pos_tol_frac);
        let _ = writeln!(out, "tolerance.size_ratio_min = {:?}", t.size_ratio_min);
        out
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = EngineConfig::parse("# lab config\ntolerance.profile = strict\ntolerance.angle_deg = 15 # looser\n\nsegmenter.smooth_window=7\n").unwrap();
        assert_eq!(cfg.tolerance.angle_tol_deg, 15.0);
        assert_eq!(cfg.tolerance.pos_tol_frac, 0.05);
        assert_eq!(cfg.segmenter.smooth_window, 7);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            EngineConfig::parse("\nbogus = 1\n"),
            Err(ConfigError::UnknownKey { line: 2, key: "bogus".into() })
        );
        assert!(matches!(EngineConfig::parse("tolerance.profile strict"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(
            EngineConfig::parse("tolerance.angle_deg = wide"),
            Err(ConfigError::BadValue { line: 1, .. })
        ));
        assert!(matches!(EngineConfig::parse("tolerance.angle_deg = 80"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn text_round_trip_and_fingerprint() {
        let cfg = EngineConfig::with_profile("strict").unwrap();
        let back = EngineConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.fingerprint(), cfg.fingerprint());
        assert_ne!(cfg.fingerprint(), EngineConfig::default().fingerprint());
        assert_eq!(cfg.fingerprint().len(), 64);
    }
}
