//! The tent tensor construction and its certificates.
//!
//! Term `k` is a tent of height `c_k = (sum_{j<=k} 1/lambda_j)^(-1/4)`
//! supported on `[2^-l_k, 2^-(l_k-1)]`, tensored with itself. The dyadic
//! supports are disjoint across terms, so for an evaluation point in band
//! `j` only term `j` is alive; that is what makes both certificates
//! closed-form.

use super::{SelectionError, TentLevels};
use crate::functions::{DyadicRational, Function1D, PiecewiseLinearPeriodic, TensorSum2D, TensorTerm};
use crate::numeric::lp_norm;
use crate::sequences::{ExponentSequence, LambdaSequence};
use serde::{Deserialize, Serialize};

/// `c_k` for `k = 1..K`.
pub fn tent_coefficients(lambda: &LambdaSequence, k_total: usize) -> Result<Vec<f64>, SelectionError> {
    let mut out = Vec::with_capacity(k_total);
    for k in 1..=k_total as u64 {
        let s = lambda.reciprocal_partial_sum(k)?;
        out.push(s.powf(-0.25));
    }
    Ok(out)
}

fn tent_function(level: u64, height: f64) -> Function1D {
    let l = level as u32;
    let mut bps = vec![DyadicRational::zero()];
    let mut vals = vec![0.0];
    if level >= 2 {
        bps.push(DyadicRational::new(1, l));
        vals.push(0.0);
        bps.push(DyadicRational::new(3, l + 1));
        vals.push(height);
        bps.push(DyadicRational::new(1, l - 1));
        vals.push(0.0);
    } else {
        // l = 1: the right foot sits at 1, which is the wrap back to 0
        bps.push(DyadicRational::new(1, 1));
        vals.push(0.0);
        bps.push(DyadicRational::new(3, 2));
        vals.push(height);
    }
    Function1D::Pwl(PiecewiseLinearPeriodic::new(bps, vals).expect("tent breakpoints are sorted"))
}

/// `sum_k r_k (x) r_k (y)` for the selected levels.
pub fn build_tent_tensor(
    lambda: &LambdaSequence,
    levels: &TentLevels,
) -> Result<TensorSum2D, SelectionError> {
    let coeffs = tent_coefficients(lambda, levels.len())?;
    let terms = levels
        .levels
        .iter()
        .zip(&coeffs)
        .map(|(&l, &c)| {
            let f = tent_function(l, c);
            TensorTerm { u: f.clone(), v: f }
        })
        .collect();
    Ok(TensorSum2D::new(terms))
}

/// Slope bound `sum_k 2^(l_k + 1) c_k^2` for the sampled continuity check
/// (each factor has slope `2^(l_k+1) c_k` and the other factor is below
/// `c_k`).
pub fn tent_lipschitz_bound(lambda: &LambdaSequence, levels: &TentLevels) -> Result<f64, SelectionError> {
    let coeffs = tent_coefficients(lambda, levels.len())?;
    Ok(levels
        .levels
        .iter()
        .zip(&coeffs)
        .map(|(&l, &c)| ((l + 1) as f64).exp2() * c * c)
        .sum())
}

/// The diagonal peak witness: `sum_{j<=k} c_j^2 / lambda_j`, bounded below
/// by `(sum_{j<=k} 1/lambda_j)^(1/2)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TentLowerWitness {
    pub k: usize,
    pub sum: f64,
    pub bound: f64,
    pub terms: Vec<f64>,
    /// Witness geometry per j: interval `(2^-l_j, 3*2^-(l_j+1))` evaluated
    /// at the peak ordinate.
    pub points: Vec<(f64, f64)>,
}

pub fn tent_sharp_lower(
    lambda: &LambdaSequence,
    levels: &TentLevels,
    k: usize,
) -> Result<TentLowerWitness, SelectionError> {
    if k == 0 || k > levels.len() {
        return Err(SelectionError::BadIndex { k });
    }
    let coeffs = tent_coefficients(lambda, k)?;
    let mut terms = Vec::with_capacity(k);
    let mut points = Vec::with_capacity(k);
    let mut sum = 0.0;
    for j in 1..=k {
        let c = coeffs[j - 1];
        let w = 1.0 / lambda.value(j as u64);
        terms.push(c * c * w);
        sum += c * c * w;
        let l = levels.levels[j - 1] as f64;
        points.push(((-l).exp2(), 1.5 * (-l - 1.0).exp2() * 2.0));
    }
    let bound = lambda.reciprocal_partial_sum(k as u64)?.sqrt();
    Ok(TentLowerWitness { k, sum, bound, terms, points })
}

/// Upper certificate for any gap-`2^-l` partition sum with free points:
/// `(sum_{j<=k} (2 c_j^2)^p(l))^(1/p(l))`, where `k` brackets `l` between
/// consecutive levels; the chain continues to `2 k^(1/p(l_{k-1}))` and the
/// constant `4e`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TentWienerCertificate {
    pub level: u64,
    pub bracket_k: usize,
    pub value: f64,
    pub terms: Vec<f64>,
    pub chain_mid: Option<f64>,
    pub chain_cap: f64,
}

pub fn tent_wiener_upper(
    lambda: &LambdaSequence,
    p: &ExponentSequence,
    levels: &TentLevels,
    level: u64,
) -> Result<TentWienerCertificate, SelectionError> {
    if levels.levels.is_empty() {
        return Err(SelectionError::BadIndex { k: 0 });
    }
    // bracket: l_{k-1} <= level < l_k; below l_1 only the first term is in
    // reach, past l_K every truncated term is
    let bracket_k = match levels.levels.iter().position(|&l| level < l) {
        Some(0) => 1,
        Some(idx) => idx + 1,
        None => levels.len() + 1,
    };
    let reach = bracket_k.min(levels.len());
    let pl = p.value(level.max(1));
    let coeffs = tent_coefficients(lambda, reach)?;
    let terms: Vec<f64> = coeffs.iter().map(|c| 2.0 * c * c).collect();
    let value = lp_norm(&terms, pl);
    let chain_mid = if bracket_k >= 2 {
        let l_prev = levels.levels[(bracket_k - 2).min(levels.len() - 1)];
        Some(2.0 * (bracket_k as f64).powf(1.0 / p.value(l_prev)))
    } else {
        None
    };
    Ok(TentWienerCertificate {
        level,
        bracket_k,
        value,
        terms,
        chain_mid,
        chain_cap: 4.0 * std::f64::consts::E,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::select_tent_levels;
    use approx::assert_relative_eq;

    fn harmonic_levels(k: usize) -> (LambdaSequence, ExponentSequence, TentLevels) {
        let l = LambdaSequence::harmonic();
        let p = ExponentSequence::linear_identity();
        let levels = select_tent_levels(&p, k).unwrap();
        (l, p, levels)
    }

    #[test]
    fn coefficients_match_reciprocal_sums() {
        let (l, _, _) = harmonic_levels(3);
        let c = tent_coefficients(&l, 3).unwrap();
        assert_relative_eq!(c[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(c[1], 1.5f64.powf(-0.25), max_relative = 1e-12);
        assert_relative_eq!(c[2], (11.0 / 6.0f64).powf(-0.25), max_relative = 1e-12);
    }

    #[test]
    fn first_tent_has_unit_peak() {
        let (l, _, levels) = harmonic_levels(1);
        let f = build_tent_tensor(&l, &levels).unwrap();
        assert_relative_eq!(f.eval(0.75, 0.75), 1.0, max_relative = 1e-12);
        assert_relative_eq!(f.eval(0.5, 0.75), 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.eval(0.0, 0.75), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn supports_are_disjoint_bands() {
        let (l, _, levels) = harmonic_levels(4);
        let f = build_tent_tensor(&l, &levels).unwrap();
        // at x in (1/2, 1) only term 1 is alive; at x in (1/4, 1/2) term 2
        let c = tent_coefficients(&l, 4).unwrap();
        assert_relative_eq!(f.eval(0.75, 0.375), c[0] * 0.0 + 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.eval(0.375, 0.375), c[1] * c[1], max_relative = 1e-12);
    }

    #[test]
    fn lower_witness_examples() {
        let (l, _, levels) = harmonic_levels(3);
        let w1 = tent_sharp_lower(&l, &levels, 1).unwrap();
        assert_relative_eq!(w1.sum, 1.0, max_relative = 1e-12);
        assert_relative_eq!(w1.bound, 1.0, max_relative = 1e-12);

        let w2 = tent_sharp_lower(&l, &levels, 2).unwrap();
        assert_relative_eq!(w2.sum, 1.0 + 1.5f64.powf(-0.5) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(w2.bound, 1.5f64.sqrt(), max_relative = 1e-12);

        let w3 = tent_sharp_lower(&l, &levels, 3).unwrap();
        assert_relative_eq!(
            w3.sum,
            1.0 + 1.5f64.powf(-0.5) / 2.0 + (11.0 / 6.0f64).powf(-0.5) / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(w3.bound, (11.0 / 6.0f64).sqrt(), max_relative = 1e-12);
        for w in [&w1, &w2, &w3] {
            assert!(w.sum >= w.bound - 1e-12);
        }
    }

    #[test]
    fn wiener_certificate_stays_under_4e() {
        let (l, p, levels) = harmonic_levels(6);
        for level in 0..=12u64 {
            let cert = tent_wiener_upper(&l, &p, &levels, level).unwrap();
            assert!(cert.value <= cert.chain_cap + 1e-12, "level {level}: {}", cert.value);
            if let Some(mid) = cert.chain_mid {
                assert!(mid <= cert.chain_cap + 1e-12);
            }
        }
        // below the first level only the first term is reachable: 2 c_1^2 = 2
        let cert = tent_wiener_upper(&l, &p, &levels, 0).unwrap();
        assert_eq!(cert.bracket_k, 1);
        assert_relative_eq!(cert.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn lipschitz_bound_holds_on_samples() {
        let (l, _, levels) = harmonic_levels(4);
        let f = build_tent_tensor(&l, &levels).unwrap();
        let bound = tent_lipschitz_bound(&l, &levels).unwrap();
        let delta = 1e-4;
        let mut max_slope = 0.0f64;
        for i in 0..2000 {
            let x = i as f64 / 2000.0;
            let y = ((i * 7919) % 2000) as f64 / 2000.0;
            max_slope = max_slope.max((f.eval(x + delta, y) - f.eval(x, y)).abs() / delta);
            max_slope = max_slope.max((f.eval(x, y + delta) - f.eval(x, y)).abs() / delta);
        }
        assert!(max_slope <= bound * (1.0 + 1e-9), "{max_slope} vs {bound}");
    }
}
