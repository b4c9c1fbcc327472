//! Experiment configuration: JSON in, strictly validated, unknown fields
//! rejected.

use crate::sequences::{
    ExponentKind, ExponentSequence, GammaForm, LambdaKind, LambdaSequence, TableExtend,
};
use crate::variation::SearchBudget;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config invalid: {0}")]
    Invalid(String),
    #[error("io error reading {path}: {err}")]
    Io { path: String, err: String },
}

/// Weight-sequence spec as it appears in config files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extend: Option<TableExtend>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    /// Lift `lambda_1` to 1 automatically instead of erroring.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub auto_shift: bool,
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec {
            kind: "harmonic".into(),
            alpha: None,
            gamma: None,
            values: None,
            extend: None,
            scale: None,
            shift: None,
            auto_shift: false,
        }
    }
}

impl LambdaSpec {
    pub fn harmonic() -> Self {
        Self::default()
    }

    pub fn build(&self) -> Result<LambdaSequence, ConfigError> {
        let kind = match self.kind.as_str() {
            "harmonic" => LambdaKind::Harmonic,
            "n_gamma" => LambdaKind::NGamma {
                gamma: self
                    .gamma
                    .ok_or_else(|| ConfigError::Invalid("n_gamma needs a gamma form".into()))?,
            },
            "power_log" => LambdaKind::PowerLog {
                alpha: self
                    .alpha
                    .ok_or_else(|| ConfigError::Invalid("power_log needs alpha".into()))?,
            },
            "table" => LambdaKind::Table {
                values: self
                    .values
                    .clone()
                    .ok_or_else(|| ConfigError::Invalid("table needs values".into()))?,
                extend: self.extend.unwrap_or(TableExtend::Reject),
            },
            other => {
                return Err(ConfigError::Invalid(format!("unknown lambda kind '{other}'")));
            }
        };
        let result = if self.auto_shift && self.scale.is_none() && self.shift.is_none() {
            LambdaSequence::with_auto_shift(kind)
        } else {
            LambdaSequence::with_transform(kind, self.scale.unwrap_or(1.0), self.shift.unwrap_or(0.0))
        };
        result.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Exponent-sequence spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for ExponentSpec {
    fn default() -> Self {
        ExponentSpec { kind: "loglog".into(), p: None, a: None, b: None, values: None }
    }
}

impl ExponentSpec {
    pub fn constant(p: f64) -> Self {
        ExponentSpec { kind: "constant".into(), p: Some(p), ..Default::default() }
    }

    pub fn identity() -> Self {
        ExponentSpec { kind: "linear".into(), a: Some(0.0), b: Some(1.0), ..Default::default() }
    }

    pub fn build(&self) -> Result<ExponentSequence, ConfigError> {
        let kind = match self.kind.as_str() {
            "constant" => ExponentKind::Constant {
                p: self.p.ok_or_else(|| ConfigError::Invalid("constant needs p".into()))?,
            },
            "linear" => ExponentKind::Linear {
                a: self.a.unwrap_or(0.0),
                b: self.b.ok_or_else(|| ConfigError::Invalid("linear needs b".into()))?,
            },
            "log" => ExponentKind::Log,
            "loglog" => ExponentKind::LogLog,
            "table" => ExponentKind::Table {
                values: self
                    .values
                    .clone()
                    .ok_or_else(|| ConfigError::Invalid("table needs values".into()))?,
            },
            other => {
                return Err(ConfigError::Invalid(format!("unknown exponent kind '{other}'")));
            }
        };
        ExponentSequence::new(kind).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Comb,
    Tent,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "LambdaSpec::default")]
    pub lambda: LambdaSpec,
    #[serde(default = "ExponentSpec::default")]
    pub p: ExponentSpec,
    /// Truncation length for the constructions.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Index range for condition tables.
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Gap level for the gap-constrained functionals.
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub budget: SearchBudget,
    #[serde(default = "default_search_cap")]
    pub search_cap: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
    /// Exact-check range for the admissibility report.
    #[serde(default = "default_admissible_n")]
    pub admissible_n: u64,
    /// Offset for the gamma-ratio comparison index.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function_path: Option<PathBuf>,
}

fn default_k() -> usize {
    4
}
fn default_n_max() -> u32 {
    20
}
fn default_search_cap() -> u64 {
    1_000_000
}
fn default_trials() -> u32 {
    200
}
fn default_admissible_n() -> u64 {
    256
}
fn default_delta() -> f64 {
    0.5
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            err: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.budget.validate().map_err(ConfigError::Invalid)?;
        if self.n_max < 4 {
            return Err(ConfigError::Invalid("n_max must be at least 4".into()));
        }
        // sequences must build
        self.lambda.build()?;
        self.p.build()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.n_max, 20);
        assert_eq!(cfg.budget.seed, 42);
        assert!(cfg.lambda.build().is_ok());
        assert!(cfg.p.build().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"lambda": {"kind": "harmonic", "oops": 2}}"#)
            .is_err());
    }

    #[test]
    fn kind_specs_parse() {
        let cfg = ExperimentConfig::from_json(
            r#"{"lambda": {"kind": "power_log", "alpha": 0.5}, "p": {"kind": "constant", "p": 2.0}}"#,
        )
        .unwrap();
        assert!(cfg.lambda.build().is_ok());
        assert_eq!(cfg.p.build().unwrap().value(10), 2.0);

        let cfg = ExperimentConfig::from_json(
            r#"{"lambda": {"kind": "table", "values": [2, 3, 5, 7], "extend": "reject"}}"#,
        )
        .unwrap();
        assert!(cfg.lambda.build().is_ok());

        let cfg = ExperimentConfig::from_json(
            r#"{"lambda": {"kind": "n_gamma", "gamma": {"inv_log_pow": {"beta": 1.0}}, "auto_shift": true}}"#,
        )
        .unwrap();
        let l = cfg.lambda.build().unwrap();
        assert!(l.shift() > 0.0);
    }

    #[test]
    fn bad_parameters_are_invalid() {
        assert!(ExperimentConfig::from_json(r#"{"p": {"kind": "constant", "p": 0.2}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"lambda": {"kind": "mystery"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"n_max": 2}"#).is_err());
    }
}
