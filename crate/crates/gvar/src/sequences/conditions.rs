//! Condition checkers: each tabulates a quantity over an index range and
//! reports a trend verdict rather than a truth value, since the underlying
//! limsup/divergence statements are not finitely decidable.
//!
//! Two engines, both with fixed documented thresholds:
//!
//! * [`table_trend`] for limsup-style quantity tables: compares the last
//!   quarter of the table against the second quarter. Bounded when the late
//!   maximum stays within `1.05x` of the mid maximum, divergent when the
//!   late minimum reaches `2x` the mid maximum.
//! * [`sum_trend`] for partial-sum divergence: looks at `S(N), S(2N), S(4N)`.
//!   A relative tail increment below `0.5%` is a plateau (bounded); otherwise
//!   a doubling-increment ratio of at least `0.8` marks sub-geometric decay,
//!   the signature of a divergent series.

use super::{ratio_argmax, ExponentSequence, LambdaSequence, SequenceError};
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const BOUNDED_PLATEAU_FACTOR: f64 = 1.05;
pub const DIVERGENT_GROWTH_FACTOR: f64 = 2.0;
pub const SUM_PLATEAU_REL_DELTA: f64 = 0.005;
pub const SUM_DIVERGENT_INC_RATIO: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "bounded-trend")]
    BoundedTrend,
    #[serde(rename = "divergent-trend")]
    DivergentTrend,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::BoundedTrend => "bounded-trend",
            Verdict::DivergentTrend => "divergent-trend",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConditionRow {
    pub n: u64,
    pub quantity: f64,
    /// Natural log of the quantity; the verdict machinery works here so
    /// astronomically large ratios do not saturate.
    pub ln_quantity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: String,
    pub verdict: Verdict,
    pub sup_observed: f64,
    pub n_range: (u64, u64),
    pub rows: Vec<ConditionRow>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn from_rows(id: &str, rows: Vec<ConditionRow>, verdict: Verdict, notes: Vec<String>) -> Self {
        let sup = rows.iter().map(|r| r.quantity).fold(f64::NEG_INFINITY, f64::max);
        let lo = rows.first().map(|r| r.n).unwrap_or(0);
        let hi = rows.last().map(|r| r.n).unwrap_or(0);
        ConditionReport {
            condition_id: id.to_string(),
            verdict,
            sup_observed: sup,
            n_range: (lo, hi),
            rows,
            notes,
        }
    }

    /// CSV body `(n, quantity)` preceded by a single `#`-prefixed JSON header
    /// line carrying the verdict.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = serde_json::json!({
            "condition_id": self.condition_id,
            "verdict": self.verdict,
            "sup_observed": self.sup_observed,
            "n_range": self.n_range,
            "notes": self.notes,
        });
        writeln!(w, "# {header}")?;
        writeln!(w, "n,quantity")?;
        for r in &self.rows {
            writeln!(w, "{},{}", r.n, r.quantity)?;
        }
        Ok(())
    }
}

/// Windowed verdict over a quantity table (see module docs). Tables shorter
/// than 8 rows are inconclusive: the windows would overlap.
pub fn table_trend(ln_values: &[f64]) -> Verdict {
    let len = ln_values.len();
    if len < 8 {
        return Verdict::Inconclusive;
    }
    let mid = &ln_values[len / 4..len / 2];
    let last = &ln_values[len - len / 4..];
    let mid_max = mid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let last_max = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let last_min = last.iter().cloned().fold(f64::INFINITY, f64::min);
    if last_max <= mid_max + BOUNDED_PLATEAU_FACTOR.ln() {
        Verdict::BoundedTrend
    } else if last_min >= mid_max + DIVERGENT_GROWTH_FACTOR.ln() {
        Verdict::DivergentTrend
    } else {
        Verdict::Inconclusive
    }
}

/// Partial-sum verdict from anchors `S(N) <= S(2N) <= S(4N)` (see module
/// docs).
pub fn sum_trend(s1: f64, s2: f64, s4: f64) -> Verdict {
    if !(s1.is_finite() && s2.is_finite() && s4.is_finite()) || s4 <= 0.0 {
        return Verdict::Inconclusive;
    }
    let inc1 = s2 - s1;
    let inc2 = s4 - s2;
    if inc2 / s4 <= SUM_PLATEAU_REL_DELTA {
        return Verdict::BoundedTrend;
    }
    if inc1 > 0.0 && inc2 / inc1 >= SUM_DIVERGENT_INC_RATIO {
        return Verdict::DivergentTrend;
    }
    Verdict::Inconclusive
}

/// Tabulates the argmax ratio for `n = 1..n_max` and reports its trend.
pub fn check_ratio_limsup(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    n_max: u32,
) -> Result<ConditionReport, SequenceError> {
    if n_max < 4 {
        return Err(SequenceError::RangeTooSmall { min: 4, got: n_max as u64 });
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let (_, r) = ratio_argmax(lambda, p, n)?;
        rows.push(ConditionRow { n: n as u64, quantity: r.linear_or_inf(), ln_quantity: r.ln });
    }
    let lns: Vec<f64> = rows.iter().map(|r| r.ln_quantity).collect();
    let verdict = table_trend(&lns);
    Ok(ConditionReport::from_rows("ratio-limsup", rows, verdict, Vec::new()))
}

/// Quantity `lambda_n * ln(n+1) / n`, same table machinery.
pub fn check_lambda_log_ratio(
    lambda: &LambdaSequence,
    n_max: u64,
) -> Result<ConditionReport, SequenceError> {
    if n_max < 1 {
        return Err(SequenceError::RangeTooSmall { min: 1, got: n_max });
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let q = lambda.try_value(n)? * ((n + 1) as f64).ln() / n as f64;
        rows.push(ConditionRow { n, quantity: q, ln_quantity: q.ln() });
    }
    let lns: Vec<f64> = rows.iter().map(|r| r.ln_quantity).collect();
    let verdict = table_trend(&lns);
    Ok(ConditionReport::from_rows("lambda-log-ratio", rows, verdict, Vec::new()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub monotone: bool,
    pub monotone_violation_at: Option<u64>,
    pub lambda1: f64,
    pub lambda1_ok: bool,
    /// Strict reading wants `lambda_1 > 1`; equality is accepted and flagged.
    pub lambda1_relaxed: bool,
    pub growth_factor: Option<f64>,
    pub sum_anchors: Option<(f64, f64, f64)>,
    pub reciprocal_sum_trend: Verdict,
    pub report: ConditionReport,
}

/// Exact checks on `1..N` plus divergence heuristics at `N, 2N, 4N`.
pub fn check_lambda_admissible(
    lambda: &LambdaSequence,
    n: u64,
) -> Result<AdmissibilityReport, SequenceError> {
    if n < 16 && lambda.max_index().map_or(true, |m| m >= 16) {
        return Err(SequenceError::RangeTooSmall { min: 16, got: n });
    }
    let usable = lambda.max_index().map_or(n, |m| m.min(n));
    let mut rows = Vec::with_capacity(usable as usize);
    let mut monotone = true;
    let mut violation = None;
    let mut prev = f64::NEG_INFINITY;
    for i in 1..=usable {
        let v = lambda.try_value(i)?;
        if v < prev {
            monotone = false;
            violation.get_or_insert(i - 1);
        }
        rows.push(ConditionRow { n: i, quantity: v, ln_quantity: v.ln() });
        prev = v;
    }
    let lambda1 = lambda.try_value(1)?;
    let lambda1_ok = lambda1 >= 1.0 - 1e-12;
    let lambda1_relaxed = lambda1_ok && lambda1 < 1.0 + 1e-12;

    // growth and sum anchors need 4N within the usable range
    let (growth, anchors, sum_verdict) = if lambda.max_index().map_or(true, |m| m >= 4 * n) {
        let growth = lambda.try_value(4 * n)? / lambda.try_value(n)?;
        let s1 = lambda.reciprocal_partial_sum(n)?;
        let s2 = lambda.reciprocal_partial_sum(2 * n)?;
        let s4 = lambda.reciprocal_partial_sum(4 * n)?;
        (Some(growth), Some((s1, s2, s4)), sum_trend(s1, s2, s4))
    } else {
        (None, None, Verdict::Inconclusive)
    };

    let mut notes = Vec::new();
    if !lambda1_ok {
        notes.push(format!("lambda_1 = {lambda1} violates the >= 1 requirement"));
    } else if lambda1_relaxed {
        notes.push("lambda_1 = 1: strict > 1 relaxed to equality".to_string());
    }
    if let Some(at) = violation {
        notes.push(format!("monotonicity fails at index {at}"));
    }
    if let Some(g) = growth {
        notes.push(format!("lambda(4N)/lambda(N) = {g}"));
    }

    let verdict = sum_verdict;
    let report = ConditionReport::from_rows("lambda-admissible", rows, verdict, notes);
    Ok(AdmissibilityReport {
        monotone,
        monotone_violation_at: violation,
        lambda1,
        lambda1_ok,
        lambda1_relaxed,
        growth_factor: growth,
        sum_anchors: anchors,
        reciprocal_sum_trend: verdict,
        report,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaConditionsReport {
    /// `gamma_n = lambda_n / n` must be nonincreasing for the checks to
    /// apply; a violation is reported, not thrown.
    pub gamma_nonincreasing: bool,
    pub gamma_violation_at: Option<u64>,
    /// Partial sums of `gamma_n / n` with the sum-trend verdict.
    pub series: Option<ConditionReport>,
    /// Ratio `gamma_n / gamma_{n^e}` with `e = max(1, floor(1 + delta))`,
    /// table-trend verdict for boundedness.
    pub ratio: Option<ConditionReport>,
}

pub fn check_gamma_conditions(
    lambda: &LambdaSequence,
    n_max: u64,
    delta: f64,
) -> Result<GammaConditionsReport, SequenceError> {
    if !(delta > 0.0) {
        return Err(SequenceError::BadParameter(format!("delta must be positive (got {delta})")));
    }
    if n_max < 16 {
        return Err(SequenceError::RangeTooSmall { min: 16, got: n_max });
    }
    let usable = lambda.max_index().map_or(n_max, |m| m.min(n_max));

    // precondition scan
    let mut prev = f64::INFINITY;
    let mut violation = None;
    for i in 1..=usable {
        let g = lambda.gamma(i)?;
        if g > prev * (1.0 + 1e-12) {
            violation = Some(i - 1);
            break;
        }
        prev = g;
    }
    if violation.is_some() {
        return Ok(GammaConditionsReport {
            gamma_nonincreasing: false,
            gamma_violation_at: violation,
            series: None,
            ratio: None,
        });
    }

    // partial sums of gamma_n / n
    let mut acc = crate::numeric::Kahan::new();
    let mut rows = Vec::with_capacity(usable as usize);
    let mut anchors = (0.0, 0.0, 0.0);
    for i in 1..=usable {
        acc.add(lambda.gamma(i)? / i as f64);
        let s = acc.value();
        rows.push(ConditionRow { n: i, quantity: s, ln_quantity: s.ln() });
        if i == usable / 4 {
            anchors.0 = s;
        }
        if i == usable / 2 {
            anchors.1 = s;
        }
    }
    anchors.2 = acc.value();
    let series_verdict = sum_trend(anchors.0, anchors.1, anchors.2);
    let series = ConditionReport::from_rows(
        "gamma-series",
        rows,
        series_verdict,
        vec![format!("anchors S(N/4)={}, S(N/2)={}, S(N)={}", anchors.0, anchors.1, anchors.2)],
    );

    // gamma_n / gamma_{n^e}
    let e = (1.0 + delta).floor().max(1.0) as u32;
    let mut rows = Vec::new();
    for i in 1..=usable {
        let idx = (i as u128).checked_pow(e).filter(|v| *v <= u64::MAX as u128);
        let Some(idx) = idx else { break };
        if let Some(max) = lambda.max_index() {
            if idx > max as u128 {
                break;
            }
        }
        let q = lambda.gamma(i)? / lambda.gamma(idx as u64)?;
        rows.push(ConditionRow { n: i, quantity: q, ln_quantity: q.ln() });
    }
    let lns: Vec<f64> = rows.iter().map(|r| r.ln_quantity).collect();
    let ratio_verdict = table_trend(&lns);
    let ratio = ConditionReport::from_rows(
        "gamma-ratio",
        rows,
        ratio_verdict,
        vec![format!("comparison index n^{e}")],
    );

    Ok(GammaConditionsReport {
        gamma_nonincreasing: true,
        gamma_violation_at: None,
        series: Some(series),
        ratio: Some(ratio),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{GammaForm, LambdaKind, TableExtend};
    use approx::assert_relative_eq;

    #[test]
    fn ratio_limsup_bounded_for_identity_exponent() {
        let l = LambdaSequence::harmonic();
        let p = ExponentSequence::linear_identity();
        let rep = check_ratio_limsup(&l, &p, 20).unwrap();
        assert_eq!(rep.verdict, Verdict::BoundedTrend);
        assert_relative_eq!(rep.sup_observed, 4.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn ratio_limsup_divergent_for_loglog_exponent() {
        let l = LambdaSequence::harmonic();
        let p = ExponentSequence::loglog();
        let rep = check_ratio_limsup(&l, &p, 20).unwrap();
        assert_eq!(rep.verdict, Verdict::DivergentTrend);
    }

    #[test]
    fn admissibility_harmonic() {
        let l = LambdaSequence::harmonic();
        let rep = check_lambda_admissible(&l, 64).unwrap();
        assert!(rep.monotone);
        assert!(rep.lambda1_ok && rep.lambda1_relaxed);
        assert_eq!(rep.reciprocal_sum_trend, Verdict::DivergentTrend);
    }

    #[test]
    fn admissibility_squares_plateau() {
        let l = LambdaSequence::new(LambdaKind::NGamma { gamma: GammaForm::Pow { e: 1.0 } })
            .unwrap();
        let rep = check_lambda_admissible(&l, 64).unwrap();
        assert_eq!(rep.reciprocal_sum_trend, Verdict::BoundedTrend);
        let (_, _, s4) = rep.sum_anchors.unwrap();
        // pi^2/6 with a ~1/256 tail still missing
        assert!(s4 > 1.63 && s4 < std::f64::consts::PI.powi(2) / 6.0);
    }

    #[test]
    fn admissibility_tiny_table_inconclusive() {
        let l = LambdaSequence::new(LambdaKind::Table {
            values: vec![2.0, 3.0, 5.0, 7.0],
            extend: TableExtend::Reject,
        })
        .unwrap();
        let rep = check_lambda_admissible(&l, 4).unwrap();
        assert!(rep.monotone);
        assert!(rep.lambda1_ok && !rep.lambda1_relaxed);
        assert_eq!(rep.reciprocal_sum_trend, Verdict::Inconclusive);
    }

    #[test]
    fn lambda_log_ratio_examples() {
        // lambda_n ~ n / ln(n+2): quantity tends to 1 from below
        let l = LambdaSequence::with_auto_shift(LambdaKind::NGamma {
            gamma: GammaForm::InvLogPow { beta: 1.0 },
        })
        .unwrap();
        let rep = check_lambda_log_ratio(&l, 1000).unwrap();
        assert_eq!(rep.verdict, Verdict::BoundedTrend);

        // tiny range: thresholds not reachable
        let h = LambdaSequence::harmonic();
        let rep = check_lambda_log_ratio(&h, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn gamma_conditions_examples() {
        // gamma = 1: series is harmonic, divergent; ratio identically 1
        let l = LambdaSequence::harmonic();
        let rep = check_gamma_conditions(&l, 100, 0.5).unwrap();
        assert!(rep.gamma_nonincreasing);
        let series = rep.series.unwrap();
        assert_eq!(series.verdict, Verdict::DivergentTrend);
        assert_relative_eq!(series.sup_observed, {
            let mut s = 0.0;
            for i in 1..=100u64 {
                s += 1.0 / i as f64;
            }
            s
        });
        let ratio = rep.ratio.unwrap();
        assert_eq!(ratio.verdict, Verdict::BoundedTrend);

        // gamma = 1/ln(n+2): sum ~ lnln n, flagged divergent at 1e5
        let slow = LambdaSequence::with_auto_shift(LambdaKind::NGamma {
            gamma: GammaForm::InvLogPow { beta: 1.0 },
        })
        .unwrap();
        let rep = check_gamma_conditions(&slow, 100_000, 1.0).unwrap();
        assert_eq!(rep.series.unwrap().verdict, Verdict::DivergentTrend);

        // gamma = 1/ln(n+2)^2: convergent series, plateaus
        let conv = LambdaSequence::with_auto_shift(LambdaKind::NGamma {
            gamma: GammaForm::InvLogPow { beta: 2.0 },
        })
        .unwrap();
        let rep = check_gamma_conditions(&conv, 100_000, 1.0).unwrap();
        assert_eq!(rep.series.unwrap().verdict, Verdict::BoundedTrend);
    }

    #[test]
    fn gamma_precondition_violation_reported() {
        // lambda = n^2 has increasing gamma = n
        let l = LambdaSequence::new(LambdaKind::NGamma { gamma: GammaForm::Pow { e: 1.0 } })
            .unwrap();
        let rep = check_gamma_conditions(&l, 100, 0.5).unwrap();
        assert!(!rep.gamma_nonincreasing);
        assert!(rep.series.is_none());
    }

    #[test]
    fn csv_shape() {
        let l = LambdaSequence::harmonic();
        let p = ExponentSequence::linear_identity();
        let rep = check_ratio_limsup(&l, &p, 8).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# {"));
        assert_eq!(lines.next().unwrap(), "n,quantity");
        assert_eq!(lines.count(), 8);
    }
}
