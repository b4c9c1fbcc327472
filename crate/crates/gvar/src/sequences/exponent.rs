//! The nondecreasing exponent sequence `p(n)`.

use super::SequenceError;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentKind {
    /// p(n) = p.
    Constant { p: f64 },
    /// p(n) = a + b*n.
    Linear { a: f64, b: f64 },
    /// p(n) = 1 + ln(n+1).
    Log,
    /// p(n) = 1 + ln(1 + ln(1 + n)).
    LogLog,
    /// Explicit prefix; constant beyond it.
    Table { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentSequence {
    kind: ExponentKind,
}

impl ExponentSequence {
    pub fn new(kind: ExponentKind) -> Result<Self, SequenceError> {
        match &kind {
            ExponentKind::Constant { p } => {
                if !(*p >= 1.0) {
                    return Err(SequenceError::BadParameter(format!(
                        "constant exponent must be >= 1 (got {p})"
                    )));
                }
            }
            ExponentKind::Linear { a, b } => {
                if !(*b >= 0.0) || !(a + b >= 1.0) {
                    return Err(SequenceError::BadParameter(format!(
                        "linear exponent needs b >= 0 and a + b >= 1 (a={a}, b={b})"
                    )));
                }
            }
            ExponentKind::Table { values } => {
                if values.is_empty() {
                    return Err(SequenceError::BadParameter("empty exponent table".into()));
                }
                if !(values[0] >= 1.0) {
                    return Err(SequenceError::BadParameter(format!(
                        "p(1) must be >= 1 (got {})",
                        values[0]
                    )));
                }
                for (i, w) in values.windows(2).enumerate() {
                    if !(w[1] >= w[0]) {
                        return Err(SequenceError::NotMonotone {
                            at: i as u64 + 1,
                            prev: w[0],
                            next: w[1],
                        });
                    }
                }
            }
            ExponentKind::Log | ExponentKind::LogLog => {}
        }
        Ok(ExponentSequence { kind })
    }

    pub fn constant(p: f64) -> Self {
        Self::new(ExponentKind::Constant { p }).expect("constant exponent >= 1")
    }

    pub fn loglog() -> Self {
        Self::new(ExponentKind::LogLog).expect("loglog is valid")
    }

    pub fn linear_identity() -> Self {
        Self::new(ExponentKind::Linear { a: 0.0, b: 1.0 }).expect("p(n) = n is valid")
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    pub fn value(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        let x = n as f64;
        match &self.kind {
            ExponentKind::Constant { p } => *p,
            ExponentKind::Linear { a, b } => a + b * x,
            ExponentKind::Log => 1.0 + x.ln_1p(),
            ExponentKind::LogLog => 1.0 + x.ln_1p().ln_1p(),
            ExponentKind::Table { values } => {
                let i = (n as usize).min(values.len());
                values[i - 1]
            }
        }
    }

    /// Limit of `p(n)`; `inf` for unbounded kinds.
    pub fn limit(&self) -> f64 {
        match &self.kind {
            ExponentKind::Constant { p } => *p,
            ExponentKind::Table { values } => *values.last().unwrap(),
            ExponentKind::Linear { b, .. } if *b == 0.0 => self.value(1),
            _ => f64::INFINITY,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.limit().is_infinite()
    }
}
