//! Two-dimensional functionals of tensor sums: marginal, sharp, mixed and
//! rectangle variants.
//!
//! All of them are suprema over finite-dimensional families once a candidate
//! point set is fixed. Small candidate sets are exhausted (mode
//! `oracle-verified`); larger ones fall back to greedy/restart heuristics
//! and stay honest lower bounds. The `v2`-flavored functionals evaluate the
//! `v1` machinery on the transposed tensor, so the symmetry identity is
//! exact by construction (their witnesses refer to the transposed function).

use super::assign::assignment_with_order;
use super::one_dim::best_interval_collection;
use super::wiener::{cyclic_dp, effective_depth};
use super::{Mode, SearchBudget, VariationEstimate, Witness};
use crate::functions::{Function1D, TensorSum2D};
use crate::numeric::derive_seed;
use crate::sequences::{ExponentSequence, LambdaSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHARP_EXACT_POINTS: usize = 12;
const SHARP_EXACT_INTERVALS: usize = 6;
const V12_EXACT_POINTS: usize = 6;
const V12_EXACT_INTERVALS: usize = 5;
const V12_EXACT_ORDER: usize = 7;
const STAR_EXACT_RECTS: usize = 130;
const STAR_EXACT_INTERVALS: usize = 4;
const BREAKPOINT_CAP: usize = 2048;

/// Candidate abscissae on the `[0, 1]` segment for one axis of a tensor sum.
fn axis_segment_candidates<'a>(
    fs: impl Iterator<Item = &'a Function1D>,
    depth: u32,
) -> Vec<f64> {
    let mut xs: Vec<f64> = vec![0.0, 1.0];
    for f in fs {
        if let Some(bps) = f.breakpoint_xs_capped(BREAKPOINT_CAP) {
            xs.extend(bps);
        }
    }
    let n = 1u64 << depth;
    xs.extend((0..=n).map(|j| j as f64 / n as f64));
    xs.retain(|x| (0.0..=1.0).contains(x));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// Candidate partition points in `[0, 1)` (cyclic variant).
fn axis_cyclic_candidates<'a>(
    fs: impl Iterator<Item = &'a Function1D>,
    depth: u32,
) -> Vec<f64> {
    let mut xs = axis_segment_candidates(fs, depth);
    xs.retain(|x| *x < 1.0);
    xs
}

/// Evaluation points for the free coordinate: breakpoints, peaks of |v|, and
/// a shallow dyadic pad for sign interactions between terms.
fn free_coordinate_candidates<'a>(
    fs: impl Iterator<Item = &'a Function1D> + Clone,
    depth: u32,
) -> Vec<f64> {
    let mut ys: Vec<f64> = vec![0.0];
    for f in fs.clone() {
        if let Some(bps) = f.breakpoint_xs_capped(BREAKPOINT_CAP) {
            ys.extend(bps);
        }
        ys.extend(f.abs_sup_points());
    }
    let n = 1u64 << depth.min(4);
    ys.extend((0..n).map(|j| j as f64 / n as f64));
    ys.retain(|y| (0.0..1.0).contains(y));
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup();
    ys
}

/// Per-term values of the u factors at the xs and v factors at the ys.
fn factor_tables(f: &TensorSum2D, xs: &[f64], ys: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let u: Vec<Vec<f64>> =
        f.terms.iter().map(|t| xs.iter().map(|x| t.u.eval(*x)).collect()).collect();
    let v: Vec<Vec<f64>> =
        f.terms.iter().map(|t| ys.iter().map(|y| t.v.eval(*y)).collect()).collect();
    (u, v)
}

/// `g[i][j] = max_y |F((x_i, x_j), y)|` with the smallest maximizing y index.
struct Envelope {
    n: usize,
    g: Vec<f64>,
    argy: Vec<usize>,
}

impl Envelope {
    fn build(f: &TensorSum2D, xs: &[f64], ys: &[f64]) -> Envelope {
        let n = xs.len();
        let k = f.terms.len();
        let (u, v) = factor_tables(f, xs, ys);
        let mut g = vec![0.0f64; n * n];
        let mut argy = vec![0usize; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut best = 0.0f64;
                let mut best_y = 0usize;
                for (yi, _) in ys.iter().enumerate() {
                    let mut s = 0.0;
                    for t in 0..k {
                        s += (u[t][j] - u[t][i]) * v[t][yi];
                    }
                    let s = s.abs();
                    if s > best {
                        best = s;
                        best_y = yi;
                    }
                }
                g[i * n + j] = best;
                g[j * n + i] = best;
                argy[i * n + j] = best_y;
                argy[j * n + i] = best_y;
            }
        }
        Envelope { n, g, argy }
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    fn y_index(&self, i: usize, j: usize) -> usize {
        self.argy[i * self.n + j]
    }
}

/// Marginal variation: `sup_y` of the one-dimensional weighted variation of
/// the section `x -> F(x, y)`.
pub fn lambda_v1(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    if f.terms.is_empty() {
        return VariationEstimate::zero();
    }
    let xs = axis_segment_candidates(f.terms.iter().map(|t| &t.u), budget.grid_depth);
    let ys = free_coordinate_candidates(f.terms.iter().map(|t| &t.v), budget.grid_depth);
    let (u, v) = factor_tables(f, &xs, &ys);
    let k = f.terms.len();
    let mut best = VariationEstimate::zero();
    for (yi, y) in ys.iter().enumerate() {
        let vals: Vec<f64> = (0..xs.len())
            .map(|i| (0..k).map(|t| u[t][i] * v[t][yi]).sum())
            .collect();
        let (value, items, _) = best_interval_collection(&xs, &vals, lambda, budget.max_intervals);
        if value > best.value {
            best = VariationEstimate::new(
                value,
                Mode::LowerBound,
                Witness::SectionIntervals { y: *y, items },
            );
        }
    }
    best
}

/// Symmetric marginal in the other variable (computed on the transpose).
pub fn lambda_v2(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    lambda_v1(&f.transposed(), lambda, budget)
}

/// All nonoverlapping interval collections (as point-index pairs) of size at
/// most `max_len` over `n` sorted points. Small inputs only.
fn enumerate_collections(n: usize, max_len: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut current: Vec<(usize, usize)> = Vec::new();
    fn recurse(
        n: usize,
        max_len: usize,
        pos: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        out.push(current.clone());
        if current.len() == max_len {
            return;
        }
        for i in pos..n.saturating_sub(1) {
            for j in i + 1..n {
                current.push((i, j));
                recurse(n, max_len, j, current, out);
                current.pop();
            }
        }
    }
    recurse(n, max_len, 0, &mut current, &mut out);
    out
}

/// Sharp marginal: each interval carries its own evaluation point, so the
/// increments are the envelope values and the search is over nonoverlapping
/// interval collections.
pub fn lambda_sharp_v1(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    if f.terms.is_empty() {
        return VariationEstimate::zero();
    }
    let xs = axis_segment_candidates(f.terms.iter().map(|t| &t.u), budget.grid_depth);
    let ys = free_coordinate_candidates(f.terms.iter().map(|t| &t.v), budget.grid_depth);
    let env = Envelope::build(f, &xs, &ys);
    let n = xs.len();
    let cap = budget.max_intervals;

    let exact = n <= SHARP_EXACT_POINTS && cap <= SHARP_EXACT_INTERVALS;
    let (value, chosen) = if exact {
        let mut best = (0.0f64, Vec::new());
        for coll in enumerate_collections(n, cap) {
            let incs: Vec<f64> = coll.iter().map(|&(i, j)| env.value(i, j)).collect();
            let (v, order) = assignment_with_order(&incs, lambda, cap);
            if v > best.0 {
                best = (v, order.iter().map(|&k| coll[k]).collect());
            }
        }
        best
    } else {
        sharp_greedy(&env, lambda, budget)
    };

    if value <= 0.0 {
        return VariationEstimate::zero();
    }
    let items: Vec<(f64, f64, f64)> = chosen
        .iter()
        .map(|&(i, j)| (xs[i], xs[j], ys[env.y_index(i, j)]))
        .collect();
    VariationEstimate::new(
        value,
        if exact { Mode::OracleVerified } else { Mode::LowerBound },
        Witness::IntervalsWithPoints { items },
    )
}

pub fn lambda_sharp_v2(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    lambda_sharp_v1(&f.transposed(), lambda, budget)
}

/// Greedy sweep by envelope value with seeded jitter restarts.
fn sharp_greedy(
    env: &Envelope,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> (f64, Vec<(usize, usize)>) {
    let n = env.n;
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let sweep = |ranked: &[(usize, usize)]| -> (f64, Vec<(usize, usize)>) {
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for &(i, j) in ranked {
            if chosen.len() == budget.max_intervals {
                break;
            }
            if env.value(i, j) <= 0.0 {
                break;
            }
            if chosen.iter().all(|&(a, b)| j <= a || b <= i) {
                chosen.push((i, j));
            }
        }
        let incs: Vec<f64> = chosen.iter().map(|&(i, j)| env.value(i, j)).collect();
        let (v, order) = assignment_with_order(&incs, lambda, budget.max_intervals);
        (v, order.iter().map(|&k| chosen[k]).collect())
    };

    let mut ranked = pairs.clone();
    ranked.sort_by(|&a, &b| env.value(b.0, b.1).total_cmp(&env.value(a.0, a.1)).then(a.cmp(&b)));
    let mut best = sweep(&ranked);

    // adjacent partition baseline
    let adjacent: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let mut adj_ranked = adjacent;
    adj_ranked
        .sort_by(|&a, &b| env.value(b.0, b.1).total_cmp(&env.value(a.0, a.1)).then(a.cmp(&b)));
    let cand = sweep(&adj_ranked);
    if cand.0 > best.0 {
        best = cand;
    }

    for r in 0..budget.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(budget.seed, r as u64));
        let mut jittered = pairs.clone();
        let mut keys: Vec<f64> =
            jittered.iter().map(|&(i, j)| env.value(i, j) * (1.0 + 0.2 * rng.gen::<f64>())).collect();
        let mut order: Vec<usize> = (0..jittered.len()).collect();
        order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
        jittered = order.iter().map(|&k| jittered[k]).collect();
        keys.clear();
        let cand = sweep(&jittered);
        if cand.0 > best.0 {
            best = cand;
        }
    }
    best
}

/// Increment matrix over a pair of interval collections.
fn rect_matrix(
    f: &TensorSum2D,
    xs: &[f64],
    ys: &[f64],
    xc: &[(usize, usize)],
    yc: &[(usize, usize)],
) -> Vec<Vec<f64>> {
    let k = f.terms.len();
    let (u, v) = factor_tables(f, xs, ys);
    let du: Vec<Vec<f64>> = (0..k)
        .map(|t| xc.iter().map(|&(i, j)| u[t][j] - u[t][i]).collect())
        .collect();
    let dv: Vec<Vec<f64>> = (0..k)
        .map(|t| yc.iter().map(|&(i, j)| v[t][j] - v[t][i]).collect())
        .collect();
    (0..xc.len())
        .map(|ii| {
            (0..yc.len())
                .map(|jj| (0..k).map(|t| du[t][ii] * dv[t][jj]).sum::<f64>().abs())
                .collect()
        })
        .collect()
}

/// Exact joint ordering: permute the smaller axis exhaustively; the other
/// axis then sorts by its weighted scores (rearrangement).
fn ordering_exact(
    m: &[Vec<f64>],
    wr: &[f64],
    wc: &[f64],
) -> (f64, Vec<usize>, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    if rows == 0 || cols == 0 {
        return (0.0, Vec::new(), Vec::new());
    }
    let transpose = cols < rows;
    let (mt, wa, wb) = if transpose {
        let t: Vec<Vec<f64>> =
            (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
        (t, wc.to_vec(), wr.to_vec())
    } else {
        (m.to_vec(), wr.to_vec(), wc.to_vec())
    };
    let a_len = mt.len();
    let mut perm: Vec<usize> = (0..a_len).collect();
    let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
    permute(&mut perm, 0, &mut |sigma: &[usize]| {
        let usable = sigma.len().min(wa.len());
        let mut scores: Vec<(f64, usize)> = (0..mt[0].len())
            .map(|j| {
                let s: f64 = (0..usable).map(|r| wa[r] * mt[sigma[r]][j]).sum();
                (s, j)
            })
            .collect();
        scores.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        let value: f64 =
            scores.iter().take(wb.len()).enumerate().map(|(r, (s, _))| wb[r] * s).sum();
        if value > best.0 {
            best = (
                value,
                sigma.to_vec(),
                scores.iter().map(|&(_, j)| j).collect(),
            );
        }
    });
    let (value, pa, pb) = best;
    if transpose {
        (value, pb, pa)
    } else {
        (value, pa, pb)
    }
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Alternating row/column sorts to a fixed point (at most 20 passes).
fn ordering_alternating(
    m: &[Vec<f64>],
    wr: &[f64],
    wc: &[f64],
    init_rows: Vec<usize>,
) -> (f64, Vec<usize>, Vec<usize>) {
    let rows = m.len();
    let cols = m[0].len();
    let mut row_order = init_rows;
    let mut col_order: Vec<usize> = (0..cols).collect();
    let score = |ro: &[usize], co: &[usize]| -> f64 {
        let mut v = 0.0;
        for (r, &i) in ro.iter().take(wr.len()).enumerate() {
            for (c, &j) in co.iter().take(wc.len()).enumerate() {
                v += wr[r] * wc[c] * m[i][j];
            }
        }
        v
    };
    let mut last = f64::NEG_INFINITY;
    for _ in 0..20 {
        // columns given rows
        let mut cs: Vec<(f64, usize)> = (0..cols)
            .map(|j| {
                let s: f64 =
                    row_order.iter().take(wr.len()).enumerate().map(|(r, &i)| wr[r] * m[i][j]).sum();
                (s, j)
            })
            .collect();
        cs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        col_order = cs.into_iter().map(|(_, j)| j).collect();
        // rows given columns
        let mut rs: Vec<(f64, usize)> = (0..rows)
            .map(|i| {
                let s: f64 =
                    col_order.iter().take(wc.len()).enumerate().map(|(c, &j)| wc[c] * m[i][j]).sum();
                (s, i)
            })
            .collect();
        rs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        row_order = rs.into_iter().map(|(_, i)| i).collect();
        let v = score(&row_order, &col_order);
        if v <= last {
            break;
        }
        last = v;
    }
    (score(&row_order, &col_order), row_order, col_order)
}

/// Mixed variation: double sum over a pair of interval collections with
/// jointly optimized row/column weight orders.
pub fn lambda_v12(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    if f.terms.is_empty() {
        return VariationEstimate::zero();
    }
    let xs = axis_segment_candidates(f.terms.iter().map(|t| &t.u), budget.grid_depth);
    let ys = axis_segment_candidates(f.terms.iter().map(|t| &t.v), budget.grid_depth);
    let cap = budget.max_intervals.min(V12_EXACT_INTERVALS.max(budget.max_intervals));
    let weights = lambda.weights_prefix(cap.max(xs.len().max(ys.len())));

    let exact = xs.len() <= V12_EXACT_POINTS
        && ys.len() <= V12_EXACT_POINTS
        && budget.max_intervals <= V12_EXACT_INTERVALS;

    let mut best = (0.0f64, Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut consider = |xc: &[(usize, usize)], yc: &[(usize, usize)]| {
        if xc.is_empty() || yc.is_empty() {
            return;
        }
        let m = rect_matrix(f, &xs, &ys, xc, yc);
        let wr = &weights[..xc.len().min(weights.len())];
        let wc = &weights[..yc.len().min(weights.len())];
        let (v, ro, co) = if xc.len().min(yc.len()) <= V12_EXACT_ORDER {
            ordering_exact(&m, wr, wc)
        } else {
            ordering_alternating(&m, wr, wc, (0..xc.len()).collect())
        };
        if v > best.0 {
            best = (
                v,
                ro.iter().take(wr.len()).map(|&i| xc[i]).collect(),
                co.iter().take(wc.len()).map(|&j| yc[j]).collect(),
                xc.to_vec(),
                yc.to_vec(),
            );
        }
    };

    if exact {
        let xcolls = enumerate_collections(xs.len(), budget.max_intervals);
        let ycolls = enumerate_collections(ys.len(), budget.max_intervals);
        for xc in &xcolls {
            for yc in &ycolls {
                consider(xc, yc);
            }
        }
    } else {
        let xcands = v12_axis_candidates(&xs, budget, 0);
        let ycands = v12_axis_candidates(&ys, budget, 1);
        for xc in &xcands {
            for yc in &ycands {
                consider(xc, yc);
            }
        }
    }

    let (value, xr, yr, _, _) = best;
    if value <= 0.0 {
        return VariationEstimate::zero();
    }
    let witness = Witness::Grid {
        xs: xr.iter().map(|&(i, j)| (xs[i], xs[j])).collect(),
        ys: yr.iter().map(|&(i, j)| (ys[i], ys[j])).collect(),
    };
    VariationEstimate::new(
        value,
        if exact { Mode::OracleVerified } else { Mode::LowerBound },
        witness,
    )
}

/// Heuristic axis collections: the adjacent partition plus seeded random
/// nonoverlapping picks.
fn v12_axis_candidates(
    xs: &[f64],
    budget: &SearchBudget,
    stream: u64,
) -> Vec<Vec<(usize, usize)>> {
    let n = xs.len();
    let mut out = Vec::new();
    let adjacent: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    out.push(adjacent);
    for r in 0..budget.restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(budget.seed, 1000 + stream * 97 + r as u64));
        let mut coll = Vec::new();
        let mut pos = 0usize;
        while coll.len() < budget.max_intervals && pos + 1 < n {
            let i = rng.gen_range(pos..n - 1);
            let j = rng.gen_range(i + 1..n);
            coll.push((i, j));
            pos = j;
        }
        out.push(coll);
    }
    out
}

/// Rectangle variation over nonoverlapping rectangle collections.
pub fn lambda_star_v(
    f: &TensorSum2D,
    lambda: &LambdaSequence,
    budget: &SearchBudget,
) -> VariationEstimate {
    if f.terms.is_empty() {
        return VariationEstimate::zero();
    }
    let xs = axis_segment_candidates(f.terms.iter().map(|t| &t.u), budget.grid_depth);
    let ys = axis_segment_candidates(f.terms.iter().map(|t| &t.v), budget.grid_depth);
    let xi: Vec<(usize, usize)> = pairs_of(xs.len());
    let yi: Vec<(usize, usize)> = pairs_of(ys.len());
    let nrects = xi.len() * yi.len();

    // rect = (x interval index, y interval index), value = |increment|
    let m = rect_matrix(f, &xs, &ys, &xi, &yi);
    let mut rects: Vec<(usize, usize)> = Vec::with_capacity(nrects);
    for ii in 0..xi.len() {
        for jj in 0..yi.len() {
            rects.push((ii, jj));
        }
    }

    let overlaps = |a: (usize, usize), b: (usize, usize)| -> bool {
        let (ax, ay) = (xi[a.0], yi[a.1]);
        let (bx, by) = (xi[b.0], yi[b.1]);
        ax.0 < bx.1 && bx.0 < ax.1 && ay.0 < by.1 && by.0 < ay.1
    };

    let exact = nrects <= STAR_EXACT_RECTS && budget.max_intervals <= STAR_EXACT_INTERVALS;
    let (value, chosen) = if exact {
        let mut best = (0.0f64, Vec::new());
        let mut current: Vec<(usize, usize)> = Vec::new();
        star_dfs(
            &rects,
            &m,
            lambda,
            budget.max_intervals,
            0,
            &mut current,
            &mut best,
            &overlaps,
        );
        best
    } else {
        star_greedy(&rects, &m, lambda, budget, &overlaps)
    };

    if value <= 0.0 {
        return VariationEstimate::zero();
    }
    let items: Vec<(f64, f64, f64, f64)> = chosen
        .iter()
        .map(|&(ii, jj)| {
            let (xa, xb) = xi[ii];
            let (ya, yb) = yi[jj];
            (xs[xa], xs[xb], ys[ya], ys[yb])
        })
        .collect();
    VariationEstimate::new(
        value,
        if exact { Mode::OracleVerified } else { Mode::LowerBound },
        Witness::Rectangles { items },
    )
}

fn pairs_of(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn star_dfs(
    rects: &[(usize, usize)],
    m: &[Vec<f64>],
    lambda: &LambdaSequence,
    cap: usize,
    start: usize,
    current: &mut Vec<(usize, usize)>,
    best: &mut (f64, Vec<(usize, usize)>),
    overlaps: &impl Fn((usize, usize), (usize, usize)) -> bool,
) {
    let incs: Vec<f64> = current.iter().map(|&(ii, jj)| m[ii][jj]).collect();
    let (v, order) = assignment_with_order(&incs, lambda, cap);
    if v > best.0 {
        *best = (v, order.iter().map(|&k| current[k]).collect());
    }
    if current.len() == cap {
        return;
    }
    for r in start..rects.len() {
        let cand = rects[r];
        if m[cand.0][cand.1] <= 0.0 {
            continue;
        }
        if current.iter().any(|&c| overlaps(c, cand)) {
            continue;
        }
        current.push(cand);
        star_dfs(rects, m, lambda, cap, r + 1, current, best, overlaps);
        current.pop();
    }
}

/// Unit cells at the budget depth plus greedy same-sign merges of adjacent
/// cells, swept by value.
fn star_greedy(
    rects: &[(usize, usize)],
    m: &[Vec<f64>],
    lambda: &LambdaSequence,
    budget: &SearchBudget,
    overlaps: &impl Fn((usize, usize), (usize, usize)) -> bool,
) -> (f64, Vec<(usize, usize)>) {
    let mut ranked: Vec<(usize, usize)> = rects.to_vec();
    ranked.sort_by(|&a, &b| m[b.0][b.1].total_cmp(&m[a.0][a.1]).then(a.cmp(&b)));
    let sweep = |ranked: &[(usize, usize)]| -> (f64, Vec<(usize, usize)>) {
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for &cand in ranked {
            if chosen.len() == budget.max_intervals {
                break;
            }
            if m[cand.0][cand.1] <= 0.0 {
                break;
            }
            if chosen.iter().all(|&c| !overlaps(c, cand)) {
                chosen.push(cand);
            }
        }
        let incs: Vec<f64> = chosen.iter().map(|&(ii, jj)| m[ii][jj]).collect();
        let (v, order) = assignment_with_order(&incs, lambda, budget.max_intervals);
        (v, order.iter().map(|&k| chosen[k]).collect())
    };
    let mut best = sweep(&ranked);
    for r in 0..budget.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(budget.seed, 500 + r as u64));
        let mut jtr = rects.to_vec();
        let keys: Vec<f64> =
            jtr.iter().map(|&(ii, jj)| m[ii][jj] * (1.0 + 0.2 * rng.gen::<f64>())).collect();
        let mut order: Vec<usize> = (0..jtr.len()).collect();
        order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
        jtr = order.iter().map(|&k| jtr[k]).collect();
        let cand = sweep(&jtr);
        if cand.0 > best.0 {
            best = cand;
        }
    }
    best
}

/// Sharp Wiener: cyclic-partition DP where each interval contributes its
/// envelope (best free point) increment.
pub fn wiener_sharp_v1(
    f: &TensorSum2D,
    p_seq: &ExponentSequence,
    n: u32,
    budget: &SearchBudget,
) -> VariationEstimate {
    assert!(n >= 1, "gap level n must be at least 1");
    if f.terms.is_empty() {
        return VariationEstimate::zero();
    }
    let p = p_seq.value(n as u64);
    let depth = effective_depth(n, budget);
    let xs = axis_cyclic_candidates(f.terms.iter().map(|t| &t.u), depth);
    let ys = free_coordinate_candidates(f.terms.iter().map(|t| &t.v), budget.grid_depth);
    let env = Envelope::build(f, &xs, &ys);
    let g = xs.len();
    let scale = env.g.iter().cloned().fold(0.0f64, f64::max);
    if scale == 0.0 || g == 0 {
        return VariationEstimate::zero();
    }
    let mut pow_inc = vec![0.0f64; g * g];
    for i in 0..g {
        for j in 0..g {
            pow_inc[i * g + j] = (env.g[i * g + j] / scale).powf(p);
        }
    }
    let min_gap = (-(n as f64)).exp2();
    let (sum, chain) = cyclic_dp(&xs, &pow_inc, min_gap);
    if sum <= 0.0 {
        return VariationEstimate::zero();
    }
    let value = scale * sum.powf(1.0 / p);
    let points: Vec<f64> = chain.iter().map(|&i| xs[i]).collect();
    let mut y_choice = Vec::with_capacity(chain.len());
    for t in 0..chain.len() {
        let a = chain[t];
        let b = chain[(t + 1) % chain.len()];
        let yi = if a == b { 0 } else { env.y_index(a, b) };
        y_choice.push(ys[yi]);
    }
    VariationEstimate::new(
        value,
        Mode::LowerBound,
        Witness::PartitionWithPoints { points, ys: y_choice, p },
    )
}

pub fn wiener_sharp_v2(
    f: &TensorSum2D,
    p_seq: &ExponentSequence,
    n: u32,
    budget: &SearchBudget,
) -> VariationEstimate {
    wiener_sharp_v1(&f.transposed(), p_seq, n, budget)
}
