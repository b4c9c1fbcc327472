//! The ratio `m^(1/p(n)) / sum_{j<=m} 1/lambda_j` and its argmax over
//! `1 <= m <= 2^n`.

use super::{ExponentSequence, LambdaSequence, SequenceError};
use crate::numeric::{Count, Kahan, LogVal};
use serde::{Deserialize, Serialize};

/// Ratio value carried in log space with the linear value when representable.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RatioValue {
    pub ln: f64,
    pub value: Option<f64>,
}

impl RatioValue {
    fn from_ln(ln: f64) -> Self {
        let lv = LogVal::from_ln(ln);
        RatioValue { ln, value: lv.value() }
    }

    pub fn linear_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

/// Full scans stay exact up to this `n`; beyond it closed-form kinds use a
/// geometric candidate grid with local refinement. Table kinds stop here.
pub(crate) const EXHAUSTIVE_MAX_N: u32 = 22;

/// `m^(1/p(n)) / sum_{j=1}^m (1/lambda_j)` for integer `m`.
pub fn ratio(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    n: u32,
    m: u128,
) -> Result<RatioValue, SequenceError> {
    if m == 0 {
        return Err(SequenceError::RangeTooSmall { min: 1, got: 0 });
    }
    ratio_count(lambda, p, n, &Count::from_u128(m))
}

/// Same, with the count allowed to exceed `u128` (addressed by its log).
pub fn ratio_count(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    n: u32,
    m: &Count,
) -> Result<RatioValue, SequenceError> {
    if n == 0 {
        return Err(SequenceError::RangeTooSmall { min: 1, got: 0 });
    }
    if m.log2() > n as f64 + 1e-9 {
        return Err(SequenceError::RatioRangeExceeded {
            m: format!("2^{:.3}", m.log2()),
            n,
        });
    }
    let pn = p.value(n as u64);
    let s = lambda.reciprocal_partial_sum_count(m)?;
    Ok(RatioValue::from_ln(m.ln() / pn - s.ln()))
}

/// Argmax of the ratio over `1 <= m <= 2^n`, ties to the smallest `m`.
///
/// For `n <= 22` this is a literal scan with an incremental compensated sum.
/// Beyond that, closed-form kinds are scanned on a geometric grid (the ratio
/// is smooth in `m`, with extrema at the range ends for every shipped kind)
/// and the winner is refined locally while the integers are resolvable.
pub fn ratio_argmax(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    n: u32,
) -> Result<(Count, RatioValue), SequenceError> {
    if n == 0 {
        return Err(SequenceError::RangeTooSmall { min: 1, got: 0 });
    }
    if n <= EXHAUSTIVE_MAX_N {
        return Ok(scan_all(lambda, p, n)?);
    }
    if !lambda.is_closed_form() {
        return Err(SequenceError::TableScanTooLarge { max: EXHAUSTIVE_MAX_N, got: n });
    }
    let pn = p.value(n as u64);

    // Linear head: the small-m region is where integer effects matter.
    let mut best_m = Count::one();
    let mut best = ratio_count(lambda, p, n, &best_m)?;
    let consider = |cand_m: Count, cand: RatioValue, best: &mut RatioValue, best_m: &mut Count| {
        if cand.ln > best.ln + 1e-12 * best.ln.abs().max(1.0) {
            *best = cand;
            *best_m = cand_m;
        }
    };
    let mut acc = Kahan::new();
    for m in 1..=256u64 {
        acc.add(1.0 / lambda.value(m));
        let cand = RatioValue::from_ln((m as f64).ln() / pn - acc.value().ln());
        consider(Count::from_u64(m), cand, &mut best, &mut best_m);
    }

    // Geometric grid over log2 m in (8, n], then the exact top end.
    const GRID: usize = 384;
    for i in 0..=GRID {
        let e = 8.0 + (n as f64 - 8.0) * i as f64 / GRID as f64;
        let cand_m = Count::from_log2(e.min(n as f64));
        let cand = ratio_count(lambda, p, n, &cand_m)?;
        consider(cand_m, cand, &mut best, &mut best_m);
    }
    let top = Count::pow2(n);
    let cand = ratio_count(lambda, p, n, &top)?;
    consider(top, cand, &mut best, &mut best_m);

    // Local integer refinement when the winner is exactly addressable.
    if let Some(center) = best_m.exact() {
        if center <= (1u128 << 52) && center > 256 {
            let lo = (center / 2).max(1);
            let hi = (center.saturating_mul(2)).min(1u128 << n.min(120));
            let mut m = lo;
            while m <= hi {
                let cand_m = Count::from_u128(m);
                let cand = ratio_count(lambda, p, n, &cand_m)?;
                consider(cand_m, cand, &mut best, &mut best_m);
                m = (m + (m / 64).max(1)).max(m + 1);
            }
        }
    }
    Ok((best_m, best))
}

fn scan_all(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    n: u32,
) -> Result<(Count, RatioValue), SequenceError> {
    let pn = p.value(n as u64);
    let top = 1u64 << n;
    let top = match lambda.max_index() {
        Some(max) if max < top => {
            return Err(SequenceError::TableIndexOutOfRange { index: top as u128, len: max as usize })
        }
        _ => top,
    };
    let mut acc = Kahan::new();
    acc.add(1.0 / lambda.value(1));
    let mut best_ln = -acc.value().ln();
    let mut best_m = 1u64;
    for m in 2..=top {
        acc.add(1.0 / lambda.value(m));
        let ln = (m as f64).ln() / pn - acc.value().ln();
        if ln > best_ln + 1e-12 * best_ln.abs().max(1.0) {
            best_ln = ln;
            best_m = m;
        }
    }
    Ok((Count::from_u64(best_m), RatioValue::from_ln(best_ln)))
}
