//! Exhaustive enumerators used to pin the estimators down on small
//! instances. These are deliberately dumb and independent of the estimator
//! code paths: plain recursion over the finite families a grid induces, with
//! hard configuration caps that error out instead of silently truncating.

use crate::functions::{Function1D, Interval, Rectangle, TensorSum2D};
use crate::numeric::lp_norm;
use crate::sequences::LambdaSequence;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid spec out of caps: {0}")]
    CapExceeded(String),
    #[error("enumeration would exceed {max} configurations (estimated {est})")]
    TooManyConfigurations { est: u128, max: u128 },
}

const MAX_CONFIGS: u128 = 10_000_000;

/// Enumeration sizes for the brute-force paths.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Dyadic refinement depth: the grid has 2^depth cells.
    pub depth: u32,
    pub max_intervals: usize,
    pub max_partition_points: usize,
}

impl GridSpec {
    pub fn new(depth: u32, max_intervals: usize, max_partition_points: usize) -> Result<Self, OracleError> {
        if depth > 6 {
            return Err(OracleError::CapExceeded(format!("depth {depth} > 6")));
        }
        if max_intervals > 6 {
            return Err(OracleError::CapExceeded(format!("max_intervals {max_intervals} > 6")));
        }
        if max_partition_points > 10 {
            return Err(OracleError::CapExceeded(format!(
                "max_partition_points {max_partition_points} > 10"
            )));
        }
        Ok(GridSpec { depth, max_intervals, max_partition_points })
    }

    /// Grid points on the segment `[0, 1]`, endpoints included.
    pub fn segment_points(&self) -> Vec<f64> {
        let n = 1u64 << self.depth;
        (0..=n).map(|j| j as f64 / n as f64).collect()
    }

    /// Grid points on the cyclic period `[0, 1)`.
    pub fn cyclic_points(&self) -> Vec<f64> {
        let n = 1u64 << self.depth;
        (0..n).map(|j| j as f64 / n as f64).collect()
    }
}

fn check_configs(est: u128) -> Result<(), OracleError> {
    if est > MAX_CONFIGS {
        return Err(OracleError::TooManyConfigurations { est, max: MAX_CONFIGS });
    }
    Ok(())
}

/// Exact number of nonoverlapping interval sequences (with at most `cap`
/// intervals, empty included) over `n` sorted points: the node count of the
/// enumeration recursions below.
fn count_collections(n: usize, cap: usize) -> u128 {
    // nodes(pos, k): enumeration nodes with next start >= pos and k
    // intervals still allowed
    let mut nodes = vec![vec![1u128; n + 1]; cap + 1];
    for k in 1..=cap {
        for pos in (0..n).rev() {
            let mut total = 1u128; // the node itself
            for i in pos..n.saturating_sub(1) {
                for j in i + 1..n {
                    total = total.saturating_add(nodes[k - 1][j]);
                }
            }
            nodes[k][pos] = total;
        }
    }
    nodes[cap][0]
}

/// Max over all orderings by literal permutation enumeration (length <= 7).
pub fn brute_assignment(values: &[f64], lambda: &LambdaSequence) -> Result<f64, OracleError> {
    if values.len() > 7 {
        return Err(OracleError::CapExceeded(format!("{} values > 7", values.len())));
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    let weights = lambda.weights_prefix(values.len());
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let mut best = f64::NEG_INFINITY;
    permute_visit(&mut idx, 0, &mut |perm| {
        let mut total = 0.0;
        for (rank, &i) in perm.iter().enumerate() {
            if rank >= weights.len() {
                break;
            }
            total += values[i].abs() * weights[rank];
        }
        best = best.max(total);
    });
    Ok(best)
}

fn permute_visit(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_visit(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Exhaustive weighted variation over nonoverlapping interval subsets of the
/// grid (all spans, not just cells).
pub fn brute_lambda_1d(
    f: &Function1D,
    lambda: &LambdaSequence,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    let pts = grid.segment_points();
    let n = pts.len();
    check_configs(count_collections(n, grid.max_intervals))?;
    let vals: Vec<f64> = pts.iter().map(|x| f.eval(*x)).collect();
    let weights = lambda.weights_prefix(grid.max_intervals);
    let mut best = 0.0f64;
    let mut current: Vec<f64> = Vec::new();
    fn recurse(
        vals: &[f64],
        weights: &[f64],
        cap: usize,
        pos: usize,
        current: &mut Vec<f64>,
        best: &mut f64,
    ) {
        let mut sorted = current.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let v: f64 = sorted.iter().zip(weights).map(|(a, w)| a * w).sum();
        *best = best.max(v);
        if current.len() == cap {
            return;
        }
        for i in pos..vals.len().saturating_sub(1) {
            for j in i + 1..vals.len() {
                current.push((vals[j] - vals[i]).abs());
                recurse(vals, weights, cap, j, current, best);
                current.pop();
            }
        }
    }
    recurse(&vals, &weights, grid.max_intervals, 0, &mut current, &mut best);
    Ok(best)
}

/// Exhaustive gap-constrained Wiener variation over all cyclic partitions
/// drawn from the grid points.
pub fn brute_wiener_1d(
    f: &Function1D,
    p: f64,
    n: u32,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    let pts = grid.cyclic_points();
    if pts.len() > grid.max_partition_points {
        return Err(OracleError::CapExceeded(format!(
            "{} candidate points > {}",
            pts.len(),
            grid.max_partition_points
        )));
    }
    check_configs(1u128 << pts.len())?;
    let vals: Vec<f64> = pts.iter().map(|x| f.eval(*x)).collect();
    let min_gap = (-(n as f64)).exp2() - 1e-12;
    let mut best = 0.0f64;
    for mask in 1u32..(1 << pts.len()) {
        let chosen: Vec<usize> = (0..pts.len()).filter(|i| mask & (1 << i) != 0).collect();
        let m = chosen.len();
        let mut ok = true;
        let mut incs = Vec::with_capacity(m);
        for t in 0..m {
            let a = chosen[t];
            let b = chosen[(t + 1) % m];
            let gap = if t + 1 == m { pts[b] + 1.0 - pts[a] } else { pts[b] - pts[a] };
            if gap < min_gap {
                ok = false;
                break;
            }
            incs.push(vals[b] - vals[a]);
        }
        if ok {
            best = best.max(lp_norm(&incs, p));
        }
    }
    Ok(best)
}

/// Exhaustive sharp marginal: nonoverlapping interval subsets with a free
/// grid point per interval, orderings by descending sort.
pub fn brute_sharp_v1(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    let pts = grid.segment_points();
    let n = pts.len();
    check_configs(count_collections(n, grid.max_intervals))?;
    // per-interval best free point, computed by literal scan
    let mut env = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let mut m = 0.0f64;
            for y in &pts {
                let iv = Interval::new(pts[i], pts[j]).unwrap();
                m = m.max(f.increment_x(&iv, *y).abs());
            }
            env[i * n + j] = m;
        }
    }
    let weights = lambda.weights_prefix(grid.max_intervals);
    let mut best = 0.0f64;
    let mut current: Vec<f64> = Vec::new();
    fn recurse(
        env: &[f64],
        n: usize,
        weights: &[f64],
        cap: usize,
        pos: usize,
        current: &mut Vec<f64>,
        best: &mut f64,
    ) {
        let mut sorted = current.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let v: f64 = sorted.iter().zip(weights).map(|(a, w)| a * w).sum();
        *best = best.max(v);
        if current.len() == cap {
            return;
        }
        for i in pos..n.saturating_sub(1) {
            for j in i + 1..n {
                current.push(env[i * n + j]);
                recurse(env, n, weights, cap, j, current, best);
                current.pop();
            }
        }
    }
    recurse(&env, n, &weights, grid.max_intervals, 0, &mut current, &mut best);
    Ok(best)
}

fn collections_on(n: usize, cap: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        n: usize,
        cap: usize,
        pos: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == cap {
            return;
        }
        for i in pos..n.saturating_sub(1) {
            for j in i + 1..n {
                cur.push((i, j));
                rec(n, cap, j, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, cap, 0, &mut cur, &mut out);
    out
}

/// Exhaustive mixed variation: all collection pairs, all row permutations,
/// columns sorted by weighted score (exact by rearrangement; validated
/// against the doubly-exhaustive ordering in tests).
pub fn brute_v12(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    if grid.max_intervals > 5 {
        return Err(OracleError::CapExceeded("mixed oracle caps at 5x5".into()));
    }
    let pts = grid.segment_points();
    let n = pts.len();
    check_configs(count_collections(n, grid.max_intervals).pow(2))?;
    let colls = collections_on(n, grid.max_intervals);
    let weights = lambda.weights_prefix(grid.max_intervals.max(n));
    let mut best = 0.0f64;
    for xc in &colls {
        for yc in &colls {
            let m: Vec<Vec<f64>> = xc
                .iter()
                .map(|&(i, j)| {
                    yc.iter()
                        .map(|&(a, b)| {
                            let r = Rectangle::new(
                                Interval::new(pts[i], pts[j]).unwrap(),
                                Interval::new(pts[a], pts[b]).unwrap(),
                            );
                            f.rect_increment(&r).abs()
                        })
                        .collect()
                })
                .collect();
            let mut rows: Vec<usize> = (0..xc.len()).collect();
            permute_visit(&mut rows, 0, &mut |sigma| {
                let usable = sigma.len().min(weights.len());
                let mut scores: Vec<f64> = (0..yc.len())
                    .map(|j| (0..usable).map(|r| weights[r] * m[sigma[r]][j]).sum())
                    .collect();
                scores.sort_by(|a, b| b.total_cmp(a));
                let v: f64 = scores.iter().zip(&weights).map(|(s, w)| s * w).sum();
                best = best.max(v);
            });
        }
    }
    Ok(best)
}

/// Exhaustive rectangle variation over nonoverlapping rectangle subsets.
pub fn brute_star(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    if grid.max_intervals > 4 {
        return Err(OracleError::CapExceeded("rectangle oracle caps at 4 rectangles".into()));
    }
    let pts = grid.segment_points();
    let n = pts.len();
    let spans: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                v.push((i, j));
            }
        }
        v
    };
    let rects: Vec<((usize, usize), (usize, usize))> = spans
        .iter()
        .flat_map(|&a| spans.iter().map(move |&b| (a, b)))
        .collect();
    let mut est = 1u128;
    for k in 0..grid.max_intervals as u128 {
        est = est.saturating_mul(rects.len() as u128) / (k + 1);
    }
    check_configs(est)?;
    let vals: Vec<f64> = rects
        .iter()
        .map(|&((i, j), (a, b))| {
            let r = Rectangle::new(
                Interval::new(pts[i], pts[j]).unwrap(),
                Interval::new(pts[a], pts[b]).unwrap(),
            );
            f.rect_increment(&r).abs()
        })
        .collect();
    let weights = lambda.weights_prefix(grid.max_intervals);
    let overlap = |x: ((usize, usize), (usize, usize)), y: ((usize, usize), (usize, usize))| {
        x.0 .0 < y.0 .1 && y.0 .0 < x.0 .1 && x.1 .0 < y.1 .1 && y.1 .0 < x.1 .1
    };
    let mut best = 0.0f64;
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        rects: &[((usize, usize), (usize, usize))],
        vals: &[f64],
        weights: &[f64],
        cap: usize,
        overlap: &impl Fn(((usize, usize), (usize, usize)), ((usize, usize), (usize, usize))) -> bool,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut f64,
    ) {
        let mut sorted: Vec<f64> = chosen.iter().map(|&k| vals[k]).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let v: f64 = sorted.iter().zip(weights).map(|(a, w)| a * w).sum();
        *best = best.max(v);
        if chosen.len() == cap {
            return;
        }
        for r in start..rects.len() {
            if vals[r] <= 0.0 {
                continue;
            }
            if chosen.iter().any(|&c| overlap(rects[c], rects[r])) {
                continue;
            }
            chosen.push(r);
            rec(rects, vals, weights, cap, overlap, r + 1, chosen, best);
            chosen.pop();
        }
    }
    rec(&rects, &vals, &weights, grid.max_intervals, &overlap, 0, &mut chosen, &mut best);
    Ok(best)
}

/// Random test instances with breakpoints on the dyadic grid, so estimator
/// and oracle candidate families coincide exactly.
pub mod instances {
    use crate::functions::{DyadicRational, Function1D, PiecewiseLinearPeriodic, TensorSum2D, TensorTerm};
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn random_pwl_on_grid(rng: &mut ChaCha8Rng, depth: u32) -> Function1D {
        let n = 1i64 << depth;
        let bps: Vec<DyadicRational> = (0..n).map(|j| DyadicRational::new(j, depth)).collect();
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Function1D::Pwl(PiecewiseLinearPeriodic::new(bps, vals).expect("grid breakpoints sorted"))
    }

    pub fn random_tensor_on_grid(rng: &mut ChaCha8Rng, depth: u32, terms: usize) -> TensorSum2D {
        TensorSum2D::new(
            (0..terms)
                .map(|_| TensorTerm {
                    u: random_pwl_on_grid(rng, depth),
                    v: random_pwl_on_grid(rng, depth),
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::DyadicComb;
    use approx::assert_relative_eq;

    #[test]
    fn assignment_examples() {
        let h = LambdaSequence::harmonic();
        let v = brute_assignment(&[0.9, 0.4, 0.7], &h).unwrap();
        assert_relative_eq!(v, 0.9 + 0.35 + 0.4 / 3.0, max_relative = 1e-12);
        assert_eq!(brute_assignment(&[], &h).unwrap(), 0.0);
        assert_relative_eq!(brute_assignment(&[1.0, 1.0], &h).unwrap(), 1.5);
        assert!(brute_assignment(&[0.0; 8], &h).is_err());
    }

    #[test]
    fn lambda_oracle_examples() {
        let h = LambdaSequence::harmonic();
        let grid = GridSpec::new(4, 4, 10).unwrap();
        let tri = Function1D::triangle(1.0);
        assert_relative_eq!(brute_lambda_1d(&tri, &h, &grid).unwrap(), 1.5, max_relative = 1e-12);
        assert_eq!(brute_lambda_1d(&Function1D::constant(2.0), &h, &grid).unwrap(), 0.0);

        // depth 4 already contains the tooth feet and peaks at scale 3
        let comb = Function1D::from(DyadicComb::from_indices(3, 0, 2, 1.0).unwrap());
        let grid4 = GridSpec::new(4, 4, 10).unwrap();
        let h4: f64 = 25.0 / 12.0;
        assert_relative_eq!(brute_lambda_1d(&comb, &h, &grid4).unwrap(), h4, max_relative = 1e-12);
    }

    #[test]
    fn wiener_oracle_examples() {
        let grid = GridSpec::new(3, 6, 8).unwrap();
        let tri = Function1D::triangle(1.0);
        assert_relative_eq!(brute_wiener_1d(&tri, 1.0, 1, &grid).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            brute_wiener_1d(&tri, 2.0, 1, &grid).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-12
        );
        assert_eq!(brute_wiener_1d(&Function1D::constant(1.0), 2.0, 2, &grid).unwrap(), 0.0);
    }

    #[test]
    fn sharp_oracle_peak_alignment() {
        let f = TensorSum2D::single(Function1D::triangle(1.0), Function1D::triangle(1.0));
        let h = LambdaSequence::harmonic();
        let grid = GridSpec::new(3, 4, 10).unwrap();
        assert_relative_eq!(brute_sharp_v1(&f, &h, &grid).unwrap(), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn v12_oracle_factorizes_on_single_terms() {
        let f = TensorSum2D::single(Function1D::triangle(1.0), Function1D::triangle(1.0));
        let h = LambdaSequence::harmonic();
        let grid = GridSpec::new(2, 4, 10).unwrap();
        let v = brute_v12(&f, &h, &grid).unwrap();
        assert_relative_eq!(v, 2.25, max_relative = 1e-12);
    }

    #[test]
    fn star_oracle_zero_and_caps() {
        let h = LambdaSequence::harmonic();
        let grid = GridSpec::new(2, 4, 10).unwrap();
        assert_eq!(brute_star(&TensorSum2D::zero(), &h, &grid).unwrap(), 0.0);
        assert!(GridSpec::new(7, 4, 10).is_err());
        assert!(GridSpec::new(4, 7, 10).is_err());
        assert!(GridSpec::new(4, 4, 11).is_err());
    }

    #[test]
    fn v12_row_perm_col_sort_equals_double_enumeration() {
        // rearrangement reduction vs full sigma x tau enumeration on a 4x4
        let m = [
            [0.9, 0.1, 0.5, 0.3],
            [0.2, 0.8, 0.3, 0.6],
            [0.4, 0.6, 0.7, 0.1],
            [0.5, 0.2, 0.9, 0.4],
        ];
        let h = LambdaSequence::harmonic();
        let w = h.weights_prefix(4);
        let mut rows: Vec<usize> = (0..4).collect();
        let mut reduced = 0.0f64;
        permute_visit(&mut rows, 0, &mut |sigma| {
            let mut scores: Vec<f64> = (0..4)
                .map(|j| (0..4).map(|r| w[r] * m[sigma[r]][j]).sum())
                .collect();
            scores.sort_by(|a, b| b.total_cmp(a));
            let v: f64 = scores.iter().zip(&w).map(|(s, wt)| s * wt).sum();
            reduced = reduced.max(v);
        });
        let mut full = 0.0f64;
        let mut rows: Vec<usize> = (0..4).collect();
        permute_visit(&mut rows, 0, &mut |sigma| {
            let sigma = sigma.to_vec();
            let mut cols: Vec<usize> = (0..4).collect();
            permute_visit(&mut cols, 0, &mut |tau| {
                let mut v = 0.0;
                for r in 0..4 {
                    for c in 0..4 {
                        v += w[r] * w[c] * m[sigma[r]][tau[c]];
                    }
                }
                full = full.max(v);
            });
        });
        assert_relative_eq!(reduced, full, max_relative = 1e-12);
    }
}
