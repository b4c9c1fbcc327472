//! Gap-constrained Wiener variation via dynamic programming over cyclic
//! partitions.
//!
//! Partitions are anchored: the DP fixes the smallest partition point at
//! each candidate in turn, runs a forward pass maximizing the sum of
//! `|increment|^p` under the minimum-gap constraint, and closes the cycle
//! with the wrap increment back to the anchor. Increment powers are
//! max-factored so large exponents cannot overflow.

use super::{Mode, VariationEstimate, Witness, GAP_EPS};
use crate::functions::Function1D;
use crate::sequences::ExponentSequence;
use crate::variation::SearchBudget;

/// The gap constraint tightens the candidate grid with `n` up to this depth;
/// past it the grid stays at the budget's depth (a finer grid would blow up
/// the cubic DP without loosening any constraint the grid can see).
pub(crate) const AUTO_DEPTH_CAP: u32 = 8;

pub(crate) fn effective_depth(n: u32, budget: &SearchBudget) -> u32 {
    n.min(AUTO_DEPTH_CAP).max(budget.grid_depth)
}

/// Candidate partition points in `[0, 1)`: function breakpoints plus the
/// dyadic grid.
pub(crate) fn cyclic_candidates(f: &Function1D, depth: u32, cap: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = Vec::new();
    if let Some(bps) = f.breakpoint_xs_capped(cap) {
        xs.extend(bps);
    }
    let n = 1u64 << depth;
    xs.extend((0..n).map(|j| j as f64 / n as f64));
    xs.retain(|x| (0.0..1.0).contains(x));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// Maximize `sum pow_inc[i][j]` over anchored cyclic chains with gaps of at
/// least `min_gap`; returns the best sum and the chain as point indices.
pub(crate) fn cyclic_dp(points: &[f64], pow_inc: &[f64], min_gap: f64) -> (f64, Vec<usize>) {
    let g = points.len();
    let idx = |i: usize, j: usize| i * g + j;
    let mut best_total = 0.0f64;
    let mut best_chain: Vec<usize> = points.get(0).map(|_| vec![0]).unwrap_or_default();
    for anchor in 0..g {
        if points[anchor] >= min_gap.min(1.0) && anchor > 0 {
            // chains anchored later start at a larger smallest point; the
            // anchor loop covers every choice of smallest point, so nothing
            // is lost by continuing. (No pruning: anchors differ in wrap.)
        }
        let mut dp = vec![f64::NEG_INFINITY; g];
        let mut parent = vec![usize::MAX; g];
        dp[anchor] = 0.0;
        for j in anchor + 1..g {
            let tj = points[j];
            for i in anchor..j {
                if dp[i] == f64::NEG_INFINITY || tj - points[i] < min_gap - GAP_EPS {
                    continue;
                }
                let cand = dp[i] + pow_inc[idx(i, j)];
                if cand > dp[j] {
                    dp[j] = cand;
                    parent[j] = i;
                }
            }
        }
        for last in anchor..g {
            if dp[last] == f64::NEG_INFINITY {
                continue;
            }
            if points[anchor] + 1.0 - points[last] < min_gap - GAP_EPS {
                continue;
            }
            let total = dp[last] + if last == anchor { 0.0 } else { pow_inc[idx(last, anchor)] };
            if total > best_total {
                let mut chain = Vec::new();
                let mut cur = last;
                while cur != usize::MAX && cur != anchor {
                    chain.push(cur);
                    cur = parent[cur];
                }
                chain.push(anchor);
                chain.reverse();
                best_total = total;
                best_chain = chain;
            }
        }
    }
    (best_total, best_chain)
}

/// Lower-bound estimate of the level-`n` Wiener variation: the supremum over
/// cyclic partitions with minimum gap `2^-n` of the `l^{p(n)}` norm of the
/// increments.
pub fn wiener_variation_1d(
    f: &Function1D,
    p_seq: &ExponentSequence,
    n: u32,
    budget: &SearchBudget,
) -> VariationEstimate {
    assert!(n >= 1, "gap level n must be at least 1");
    let p = p_seq.value(n as u64);
    let depth = effective_depth(n, budget);
    let points = cyclic_candidates(f, depth, 4096);
    let g = points.len();
    if g == 0 {
        return VariationEstimate::zero();
    }
    let vals: Vec<f64> = points.iter().map(|x| f.eval(*x)).collect();
    let scale = {
        let mut m = 0.0f64;
        for i in 0..g {
            for j in i + 1..g {
                m = m.max((vals[j] - vals[i]).abs());
            }
        }
        m
    };
    if scale == 0.0 {
        return VariationEstimate::zero();
    }
    let mut pow_inc = vec![0.0f64; g * g];
    for i in 0..g {
        for j in 0..g {
            pow_inc[i * g + j] = ((vals[j] - vals[i]).abs() / scale).powf(p);
        }
    }
    let min_gap = (-(n as f64)).exp2();
    let (sum, chain) = cyclic_dp(&points, &pow_inc, min_gap);
    if sum <= 0.0 {
        return VariationEstimate::zero();
    }
    let value = scale * sum.powf(1.0 / p);
    let witness_points: Vec<f64> = chain.iter().map(|&i| points[i]).collect();
    VariationEstimate::new(
        value,
        Mode::LowerBound,
        Witness::Partition { points: witness_points, p },
    )
}

/// The full profile over `n = 1..n_max` together with its running supremum.
pub fn wiener_profile(
    f: &Function1D,
    p_seq: &ExponentSequence,
    n_max: u32,
    budget: &SearchBudget,
) -> (f64, Vec<(u32, VariationEstimate)>) {
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut sup = 0.0f64;
    for n in 1..=n_max {
        let est = wiener_variation_1d(f, p_seq, n, budget);
        sup = sup.max(est.value);
        rows.push((n, est));
    }
    (sup, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::LambdaSequence;
    use crate::variation::{reevaluate_witness, EvalTarget};
    use approx::assert_relative_eq;

    #[test]
    fn triangle_examples() {
        let f = Function1D::triangle(1.0);
        let budget = SearchBudget::with_depth(5);
        let est = wiener_variation_1d(&f, &ExponentSequence::constant(1.0), 1, &budget);
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-12);
        if let Witness::Partition { points, .. } = &est.witness {
            assert_eq!(points.len(), 2);
        } else {
            panic!("expected partition witness");
        }

        let est2 = wiener_variation_1d(&f, &ExponentSequence::constant(2.0), 1, &budget);
        assert_relative_eq!(est2.value, 2f64.sqrt(), max_relative = 1e-12);

        let h = LambdaSequence::harmonic();
        let re = reevaluate_witness(&est2.witness, &EvalTarget::OneDim(&f), &h).unwrap();
        assert_relative_eq!(re, est2.value, max_relative = 1e-9);
    }

    #[test]
    fn constant_function_vanishes() {
        let f = Function1D::constant(1.0);
        let est =
            wiener_variation_1d(&f, &ExponentSequence::constant(2.0), 3, &SearchBudget::default());
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn value_is_nondecreasing_in_n() {
        let f = Function1D::from(crate::functions::DyadicComb::from_indices(4, 1, 6, 0.8).unwrap());
        let p = ExponentSequence::constant(1.5);
        let budget = SearchBudget::with_depth(4);
        let mut prev = 0.0;
        for n in 1..=6 {
            let est = wiener_variation_1d(&f, &p, n, &budget);
            assert!(est.value >= prev - 1e-12, "n={n}: {} < {prev}", est.value);
            prev = est.value;
        }
    }

    #[test]
    fn profile_reports_running_sup() {
        let f = Function1D::triangle(1.0);
        let p = ExponentSequence::constant(1.0);
        let (sup, rows) = wiener_profile(&f, &p, 4, &SearchBudget::with_depth(4));
        assert_eq!(rows.len(), 4);
        assert_relative_eq!(sup, 2.0, max_relative = 1e-12);
    }
}
