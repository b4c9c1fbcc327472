//! Randomized check of the partition-sum inequality: for partitions with
//! minimum gap `2^-n` and free per-interval points,
//! `(sum |F(I_k, y_k)|^p(n))^(1/p(n))` stays below the sharp-variation upper
//! certificate times the level-`n` argmax ratio.

use crate::functions::{CyclicPartition, TensorSum2D};
use crate::numeric::lp_norm;
use crate::sequences::{ratio_argmax, ExponentSequence, LambdaSequence, SequenceError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityReport {
    pub trials: u32,
    pub n: u32,
    pub p_at_n: f64,
    pub rhs: f64,
    pub max_lhs: f64,
    pub max_ratio: f64,
    /// Partitions whose sum exceeded the bound, with their ratios.
    pub violations: Vec<(f64, Vec<f64>)>,
}

/// A random cyclic partition with all gaps at least `2^-n`: gap slack is
/// spread by normalized exponentials and the whole partition gets a random
/// rotation.
pub fn sample_cyclic_partition(rng: &mut ChaCha8Rng, n: u32, max_points: usize) -> CyclicPartition {
    let gap = (-(n as f64)).exp2();
    let cap = ((1.0 / gap) as usize).max(1).min(max_points.max(1));
    let m = rng.gen_range(1..=cap);
    let mut weights: Vec<f64> = (0..m).map(|_| -(rng.gen::<f64>().max(1e-12)).ln()).collect();
    let total: f64 = weights.iter().sum();
    let slack = 1.0 - m as f64 * gap;
    for w in &mut weights {
        *w = gap + slack * (*w / total);
    }
    let offset = rng.gen::<f64>();
    let mut points = Vec::with_capacity(m);
    let mut t = offset;
    for w in &weights {
        points.push(t - t.floor());
        t += w;
    }
    CyclicPartition::new(points).expect("sampled gaps are positive and sum to 1")
}

/// Run `trials` random partitions-with-points at level `n` and compare each
/// `l^{p(n)}` sum against `upper_cert * ratio(n)`.
pub fn partition_inequality_check(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    p_seq: &ExponentSequence,
    n: u32,
    trials: u32,
    seed: u64,
    upper_cert: f64,
) -> Result<InequalityReport, SequenceError> {
    let (_, ratio) = ratio_argmax(lambda, p_seq, n)?;
    let rhs = upper_cert * ratio.linear_or_inf();
    let p = p_seq.value(n as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_lhs = 0.0f64;
    let mut violations = Vec::new();
    for _ in 0..trials {
        let part = sample_cyclic_partition(&mut rng, n, 64);
        let intervals = part.intervals();
        let ys: Vec<f64> = (0..intervals.len()).map(|_| rng.gen::<f64>()).collect();
        let incs: Vec<f64> = intervals
            .iter()
            .zip(&ys)
            .map(|(iv, y)| f.increment_x(iv, *y))
            .collect();
        let lhs = lp_norm(&incs, p);
        max_lhs = max_lhs.max(lhs);
        if lhs > rhs * (1.0 + 1e-9) {
            violations.push((lhs / rhs, part.points().to_vec()));
        }
    }
    Ok(InequalityReport {
        trials,
        n,
        p_at_n: p,
        rhs,
        max_lhs,
        max_ratio: if rhs > 0.0 { max_lhs / rhs } else { f64::INFINITY },
        violations,
    })
}
