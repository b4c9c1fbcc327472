//! The weight sequence and its partial reciprocal sums.
//!
//! All estimators reduce to sums of the form `sum_{j=1}^m 1/lambda_j`. The
//! direct path is a checkpointed compensated scan; for closed-form kinds and
//! very large `m` an Euler-Maclaurin tail takes over:
//!
//! ```text
//! S(m) = S(A) + int_A^m g(x) dx + (g(m) - g(A))/2 + (g'(m) - g'(A))/12
//! ```
//!
//! with `g = 1/lambda`, anchored at an exactly-summed `A`. Dropped terms are
//! O(g'''(A)) ~ 1e-16 at the default anchor, far inside the 1e-9 budget.
//! The integral is evaluated in `t = ln x`, which keeps the integrand smooth
//! and makes sums addressable by `ln m` alone: tooth counts in the
//! constructions reach 2^233 and beyond.

use super::SequenceError;
use crate::numeric::{integrate, Count, Kahan};
use serde::{Deserialize, Serialize};
use std::sync::Mutex;

/// Closed forms for the slowly-varying factor in `lambda_n = n * gamma_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaForm {
    /// gamma_n = 1, i.e. the harmonic weights again.
    One,
    /// gamma_n = (ln(n+2))^(-beta).
    InvLogPow { beta: f64 },
    /// gamma_n = n^e, so lambda_n = n^(1+e).
    Pow { e: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableExtend {
    /// Queries past the prefix are errors.
    Reject,
    /// Continue with the last increment of the prefix.
    RepeatLastGrowth,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaKind {
    /// lambda_n = n.
    Harmonic,
    /// lambda_n = n * gamma_n.
    NGamma { gamma: GammaForm },
    /// lambda_n = n / (ln(n+1))^alpha.
    PowerLog { alpha: f64 },
    /// Explicit prefix plus an extension rule.
    Table { values: Vec<f64>, extend: TableExtend },
}

impl LambdaKind {
    fn is_closed_form(&self) -> bool {
        !matches!(self, LambdaKind::Table { .. })
    }
}

/// Nondecreasing positive weights with divergent reciprocal sum.
///
/// `value(n) = scale * base(n) + shift`. The shift exists because several
/// natural kinds start below 1 while the admissibility condition wants
/// `lambda_1 > 1`; a first weight of exactly 1 is accepted and flagged.
#[derive(Debug, Serialize)]
pub struct LambdaSequence {
    kind: LambdaKind,
    scale: f64,
    shift: f64,
    /// Set when lambda_1 = 1, the relaxation of the strict `> 1` requirement.
    lambda1_relaxed: bool,
    #[serde(skip)]
    cache: Mutex<Vec<f64>>,
}

impl Clone for LambdaSequence {
    fn clone(&self) -> Self {
        LambdaSequence {
            kind: self.kind.clone(),
            scale: self.scale,
            shift: self.shift,
            lambda1_relaxed: self.lambda1_relaxed,
            cache: Mutex::new(Vec::new()),
        }
    }
}

/// Chunk length between cached partial-sum checkpoints. Checkpoints are
/// always built sequentially so results do not depend on query order.
const CHUNK: u64 = 1 << 16;

/// Above this the closed-form kinds switch to the analytic tail.
const DIRECT_LIMIT: u128 = 10_000_000;

/// Anchor for the analytic path: summed exactly, then integrated beyond.
const ANALYTIC_ANCHOR: u64 = 4096;

impl LambdaSequence {
    pub fn new(kind: LambdaKind) -> Result<Self, SequenceError> {
        Self::with_transform(kind, 1.0, 0.0)
    }

    /// Construct with an affine transform `scale * base(n) + shift`.
    pub fn with_transform(kind: LambdaKind, scale: f64, shift: f64) -> Result<Self, SequenceError> {
        if !(scale > 0.0) || !shift.is_finite() || shift < 0.0 {
            return Err(SequenceError::BadParameter(format!(
                "scale must be positive and shift nonnegative (scale={scale}, shift={shift})"
            )));
        }
        match &kind {
            LambdaKind::PowerLog { alpha } => {
                if !(*alpha >= 0.0) {
                    return Err(SequenceError::BadParameter(format!(
                        "power_log alpha must be >= 0 (got {alpha})"
                    )));
                }
            }
            LambdaKind::NGamma { gamma } => match gamma {
                GammaForm::InvLogPow { beta } if !(*beta >= 0.0) => {
                    return Err(SequenceError::BadParameter(format!(
                        "inv_log_pow beta must be >= 0 (got {beta})"
                    )));
                }
                GammaForm::Pow { e } if !(*e > -1.0) => {
                    return Err(SequenceError::BadParameter(format!(
                        "pow exponent must be > -1 (got {e})"
                    )));
                }
                _ => {}
            },
            LambdaKind::Table { values, .. } => {
                if values.is_empty() {
                    return Err(SequenceError::BadParameter("empty table".into()));
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
                if !values.iter().all(|v| v.is_finite() && *v > 0.0) {
                    return Err(SequenceError::BadParameter(
                        "table values must be finite and positive".into(),
                    ));
                }
            }
            LambdaKind::Harmonic => {}
        }
        let seq = LambdaSequence {
            kind,
            scale,
            shift,
            lambda1_relaxed: false,
            cache: Mutex::new(Vec::new()),
        };
        let l1 = seq.try_value(1)?;
        if l1 < 1.0 - 1e-12 {
            return Err(SequenceError::FirstWeightTooSmall { lambda1: l1 });
        }
        // Spot-check monotonicity on a prefix; closed forms stay monotone
        // beyond it for the parameter ranges admitted above.
        let mut prev = l1;
        for n in 2..=256u64 {
            let v = match seq.try_value(n) {
                Ok(v) => v,
                Err(_) => break,
            };
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(SequenceError::NotMonotone { at: n - 1, prev, next: v });
            }
            prev = v;
        }
        let relaxed = l1 < 1.0 + 1e-12;
        Ok(LambdaSequence { lambda1_relaxed: relaxed, ..seq })
    }

    /// Construct with the smallest shift that lifts `lambda_1` to 1.
    pub fn with_auto_shift(kind: LambdaKind) -> Result<Self, SequenceError> {
        let probe = LambdaSequence {
            kind: kind.clone(),
            scale: 1.0,
            shift: 0.0,
            lambda1_relaxed: false,
            cache: Mutex::new(Vec::new()),
        };
        let raw1 = probe.raw(1.0);
        let shift = (1.0 - raw1).max(0.0);
        Self::with_transform(kind, 1.0, shift)
    }

    pub fn harmonic() -> Self {
        Self::new(LambdaKind::Harmonic).expect("harmonic weights are valid")
    }

    pub fn kind(&self) -> &LambdaKind {
        &self.kind
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True when the admissibility requirement `lambda_1 > 1` was relaxed to
    /// equality at construction.
    pub fn lambda1_relaxed(&self) -> bool {
        self.lambda1_relaxed
    }

    pub fn is_closed_form(&self) -> bool {
        self.kind.is_closed_form()
    }

    /// Length of the usable index range: `None` means unbounded.
    pub fn max_index(&self) -> Option<u64> {
        match &self.kind {
            LambdaKind::Table { values, extend: TableExtend::Reject } => Some(values.len() as u64),
            _ => None,
        }
    }

    fn raw(&self, x: f64) -> f64 {
        match &self.kind {
            LambdaKind::Harmonic => x,
            LambdaKind::NGamma { gamma } => match gamma {
                GammaForm::One => x,
                GammaForm::InvLogPow { beta } => x / (x + 2.0).ln().powf(*beta),
                GammaForm::Pow { e } => x.powf(1.0 + e),
            },
            LambdaKind::PowerLog { alpha } => x / (x + 1.0).ln().powf(*alpha),
            LambdaKind::Table { values, extend } => {
                let n = x as usize;
                if n <= values.len() {
                    values[n - 1]
                } else {
                    match extend {
                        TableExtend::Reject => f64::NAN,
                        TableExtend::RepeatLastGrowth => {
                            let last = *values.last().unwrap();
                            let step = if values.len() >= 2 {
                                last - values[values.len() - 2]
                            } else {
                                0.0
                            };
                            last + step * (x - values.len() as f64)
                        }
                    }
                }
            }
        }
    }

    /// `ln lambda(e^t)`, overflow-safe for the quadrature path.
    fn ln_lambda_at_ln(&self, t: f64) -> f64 {
        let ln_raw = match &self.kind {
            LambdaKind::Harmonic => t,
            LambdaKind::NGamma { gamma } => match gamma {
                GammaForm::One => t,
                // ln(x+2) = t + ln(1 + 2 e^-t)
                GammaForm::InvLogPow { beta } => t - beta * (t + (2.0 * (-t).exp()).ln_1p()).ln(),
                GammaForm::Pow { e } => (1.0 + e) * t,
            },
            LambdaKind::PowerLog { alpha } => t - alpha * (t + (-t).exp().ln_1p()).ln(),
            LambdaKind::Table { .. } => unreachable!("analytic path is closed-form only"),
        };
        // ln(scale * raw + shift) without forming raw when it is huge.
        let mut v = self.scale.ln() + ln_raw;
        if self.shift > 0.0 {
            v += (self.shift / self.scale * (-ln_raw).exp()).ln_1p();
        }
        v
    }

    /// `lambda_n`; errors only past a reject-rule table prefix.
    pub fn try_value(&self, n: u64) -> Result<f64, SequenceError> {
        if n == 0 {
            return Err(SequenceError::RangeTooSmall { min: 1, got: 0 });
        }
        if let LambdaKind::Table { values, extend: TableExtend::Reject } = &self.kind {
            if n as usize > values.len() {
                return Err(SequenceError::TableIndexOutOfRange {
                    index: n as u128,
                    len: values.len(),
                });
            }
        }
        Ok(self.scale * self.raw(n as f64) + self.shift)
    }

    /// `lambda_n` where the caller has already validated the range.
    pub fn value(&self, n: u64) -> f64 {
        self.try_value(n).expect("lambda index out of validated range")
    }

    /// The reciprocal weights `1/lambda_1 ... 1/lambda_len`, truncated early
    /// if the table runs out.
    pub fn weights_prefix(&self, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        for i in 1..=len as u64 {
            match self.try_value(i) {
                Ok(v) => out.push(1.0 / v),
                Err(_) => break,
            }
        }
        out
    }

    /// `sum_{j=1}^m 1/lambda_j` with relative accuracy well inside 1e-9.
    pub fn reciprocal_partial_sum(&self, m: u64) -> Result<f64, SequenceError> {
        self.reciprocal_partial_sum_count(&Count::from_u64(m))
    }

    pub fn reciprocal_partial_sum_count(&self, m: &Count) -> Result<f64, SequenceError> {
        if let Some(exact) = m.exact() {
            if let Some(max) = self.max_index() {
                if exact > max as u128 {
                    return Err(SequenceError::TableIndexOutOfRange {
                        index: exact,
                        len: max as usize,
                    });
                }
            }
            if exact <= DIRECT_LIMIT || !self.kind.is_closed_form() {
                return Ok(self.sum_direct(exact as u64));
            }
        } else if !self.kind.is_closed_form() {
            return Err(SequenceError::BadParameter(
                "table weights cannot be summed at inexact counts".into(),
            ));
        }
        Ok(self.sum_analytic_at_ln(m.ln()))
    }

    /// Analytic-tail evaluation; exposed so tests can pit it against the
    /// direct scan at moderate `m`.
    pub fn reciprocal_partial_sum_analytic(&self, m: u64) -> Result<f64, SequenceError> {
        if !self.kind.is_closed_form() {
            return Err(SequenceError::BadParameter(
                "analytic path requires a closed-form kind".into(),
            ));
        }
        Ok(self.sum_analytic_at_ln((m as f64).ln()))
    }

    /// Sum addressed by `ln m` directly (for counts past u128).
    pub fn reciprocal_partial_sum_at_ln(&self, ln_m: f64) -> Result<f64, SequenceError> {
        if !self.kind.is_closed_form() {
            return Err(SequenceError::BadParameter(
                "table weights cannot be summed at inexact counts".into(),
            ));
        }
        Ok(self.sum_analytic_at_ln(ln_m))
    }

    fn sum_direct(&self, m: u64) -> f64 {
        let full_chunks = m / CHUNK;
        let base = if full_chunks == 0 { 0.0 } else { self.checkpoint(full_chunks) };
        let mut acc = Kahan::with(base);
        for j in full_chunks * CHUNK + 1..=m {
            acc.add(1.0 / (self.scale * self.raw(j as f64) + self.shift));
        }
        acc.value()
    }

    /// Partial sum at `c * CHUNK`, extending the checkpoint table in order.
    fn checkpoint(&self, c: u64) -> f64 {
        let mut cache = self.cache.lock().unwrap();
        while cache.len() < c as usize {
            let done = cache.len() as u64;
            let base = if done == 0 { 0.0 } else { cache[done as usize - 1] };
            let mut acc = Kahan::with(base);
            for j in done * CHUNK + 1..=(done + 1) * CHUNK {
                acc.add(1.0 / (self.scale * self.raw(j as f64) + self.shift));
            }
            cache.push(acc.value());
        }
        cache[c as usize - 1]
    }

    fn sum_analytic_at_ln(&self, ln_m: f64) -> f64 {
        let g = |x: f64| 1.0 / (self.scale * self.raw(x) + self.shift);
        let anchor = {
            // keep the anchor comfortably below m
            let m_est = ln_m.exp();
            if m_est.is_finite() && (m_est / 4.0) < ANALYTIC_ANCHOR as f64 {
                ((m_est / 4.0).floor() as u64).max(16)
            } else {
                ANALYTIC_ANCHOR
            }
        };
        let s_anchor = self.sum_direct(anchor);
        let a = anchor as f64;
        let t0 = a.ln();
        // integrand in t = ln x: e^(t - ln lambda(e^t))
        let integral = integrate(|t| (t - self.ln_lambda_at_ln(t)).exp(), t0, ln_m, 2.0);
        let g_a = g(a);
        let g_m = (ln_m - self.ln_lambda_at_ln(ln_m)).exp() * (-ln_m).exp();
        // derivative corrections: central difference at the anchor, zero at
        // m (g' decays at least quadratically there)
        let d_a = (g(a + 1.0) - g(a - 1.0)) / 2.0;
        let d_m = if ln_m < 30.0 {
            let m = ln_m.exp();
            (g(m + 1.0) - g(m - 1.0)) / 2.0
        } else {
            0.0
        };
        s_anchor + integral + (g_m - g_a) / 2.0 + (d_m - d_a) / 12.0
    }

    /// Gamma factor `lambda_n / n`.
    pub fn gamma(&self, n: u64) -> Result<f64, SequenceError> {
        Ok(self.try_value(n)? / n as f64)
    }
}
