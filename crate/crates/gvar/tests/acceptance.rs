//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Criteria:
//!   1. rearrangement pairing equals exhaustive permutation assignment
//!   2. one-variable weighted variation equals its exhaustive oracle
//!   3. gap-constrained Wiener DP equals its exhaustive oracle
//!   4. the two-variable estimators equal their exhaustive oracles
//!   5. the comb chain: upper certificate < 4, witness growth >= 1.5,
//!      randomized partition inequality below the certified bound
//!   6. the tent chain: lower witnesses dominate the sqrt bound, certificates
//!      stay under 4e, the DP stays under the certificate, continuity holds
//!   7. condition-checker fidelity on the two canonical sequence pairs
//!   8. byte-identical verify outputs for identical seeds

use gvar::constructions::{
    build_comb_tensor, build_tent_tensor, comb_sharp_upper, comb_witness_lower,
    select_comb_indices, select_tent_levels, tent_lipschitz_bound, tent_sharp_lower,
    tent_wiener_upper,
};
use gvar::oracle::{self, instances, GridSpec};
use gvar::sequences::{
    check_ratio_limsup, ExponentSequence, LambdaKind, LambdaSequence, Verdict,
};
use gvar::variation::{
    lambda_sharp_v1, lambda_star_v, lambda_v12, lambda_variation_1d, optimal_assignment,
    partition_inequality_check, wiener_sharp_v1, wiener_variation_1d, SearchBudget,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: u32, pass: bool, detail: &str, elapsed_s: f64, limit_s: f64) -> bool {
    let status = if pass && elapsed_s < limit_s { "PASS" } else { "FAIL" };
    println!("{status} criterion {criterion}: {detail} ({elapsed_s:.2}s, limit {limit_s:.0}s)");
    pass && elapsed_s < limit_s
}

#[test]
fn criterion_1_rearrangement_optimality() {
    let start = Instant::now();
    let harmonic = LambdaSequence::harmonic();
    let power_log = LambdaSequence::new(LambdaKind::PowerLog { alpha: 0.5 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_diff = 0.0f64;
    for t in 0..1000 {
        let lambda = if t % 2 == 0 { &harmonic } else { &power_log };
        let len = rng.gen_range(0..=7);
        let vals: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let fast = optimal_assignment(&vals, lambda);
        let brute = oracle::brute_assignment(&vals, lambda).unwrap();
        max_diff = max_diff.max((fast - brute).abs());
    }
    let ok = report(
        1,
        max_diff <= 1e-12,
        &format!("1000 random collections, max |diff| = {max_diff:.2e}"),
        start.elapsed().as_secs_f64(),
        5.0,
    );
    assert!(ok);
}

#[test]
fn criterion_2_lambda_1d_oracle_equivalence() {
    let start = Instant::now();
    let harmonic = LambdaSequence::harmonic();
    let grid = GridSpec::new(4, 4, 10).unwrap();
    let budget = SearchBudget { grid_depth: 4, max_intervals: 4, restarts: 2, seed: 7 };
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut max_diff = 0.0f64;
    for _ in 0..200 {
        let f = instances::random_pwl_on_grid(&mut rng, 4);
        let est = lambda_variation_1d(&f, &harmonic, &budget);
        let orc = oracle::brute_lambda_1d(&f, &harmonic, &grid).unwrap();
        max_diff = max_diff.max((est.value - orc).abs());
    }
    let ok = report(
        2,
        max_diff <= 1e-9,
        &format!("200 depth-4 functions, max |est - oracle| = {max_diff:.2e}"),
        start.elapsed().as_secs_f64(),
        30.0,
    );
    assert!(ok);
}

#[test]
fn criterion_3_wiener_dp_oracle_equivalence() {
    let start = Instant::now();
    let grid = GridSpec::new(3, 6, 8).unwrap();
    let budget = SearchBudget { grid_depth: 3, max_intervals: 6, restarts: 2, seed: 7 };
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut max_diff = 0.0f64;
    for _ in 0..100 {
        let f = instances::random_pwl_on_grid(&mut rng, 3);
        for p_val in [1.0, 1.5, 2.0, 3.0] {
            let p_seq = ExponentSequence::constant(p_val);
            for n in [1u32, 2, 3] {
                let est = wiener_variation_1d(&f, &p_seq, n, &budget);
                let orc = oracle::brute_wiener_1d(&f, p_val, n, &grid).unwrap();
                max_diff = max_diff.max((est.value - orc).abs());
            }
        }
    }
    let ok = report(
        3,
        max_diff <= 1e-9,
        &format!("100 functions x 4 exponents x 3 levels, max |diff| = {max_diff:.2e}"),
        start.elapsed().as_secs_f64(),
        30.0,
    );
    assert!(ok);
}

#[test]
fn criterion_4_two_dim_oracle_equivalence() {
    let start = Instant::now();
    let harmonic = LambdaSequence::harmonic();

    // sharp marginal on depth-3 grids
    let grid3 = GridSpec::new(3, 4, 10).unwrap();
    let budget3 = SearchBudget { grid_depth: 3, max_intervals: 4, restarts: 2, seed: 7 };
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut d_sharp = 0.0f64;
    for _ in 0..50 {
        let f = instances::random_tensor_on_grid(&mut rng, 3, 2);
        let est = lambda_sharp_v1(&f, &harmonic, &budget3);
        let orc = oracle::brute_sharp_v1(&f, &harmonic, &grid3).unwrap();
        d_sharp = d_sharp.max((est.value - orc).abs());
    }

    // mixed variation with up to 5x5 increment matrices
    let grid2 = GridSpec::new(2, 5, 10).unwrap();
    let budget2 = SearchBudget { grid_depth: 2, max_intervals: 5, restarts: 2, seed: 7 };
    let mut d_v12 = 0.0f64;
    for _ in 0..50 {
        let f = instances::random_tensor_on_grid(&mut rng, 2, 2);
        let est = lambda_v12(&f, &harmonic, &budget2);
        let orc = oracle::brute_v12(&f, &harmonic, &grid2).unwrap();
        d_v12 = d_v12.max((est.value - orc).abs());
    }

    // rectangle variation with up to 4 rectangles
    let grid_star = GridSpec::new(2, 4, 10).unwrap();
    let budget_star = SearchBudget { grid_depth: 2, max_intervals: 4, restarts: 2, seed: 7 };
    let mut d_star = 0.0f64;
    for _ in 0..50 {
        let f = instances::random_tensor_on_grid(&mut rng, 2, 2);
        let est = lambda_star_v(&f, &harmonic, &budget_star);
        let orc = oracle::brute_star(&f, &harmonic, &grid_star).unwrap();
        d_star = d_star.max((est.value - orc).abs());
    }

    let max_diff = d_sharp.max(d_v12).max(d_star);
    let ok = report(
        4,
        max_diff <= 1e-9,
        &format!(
            "50 tensor sums each: sharp {d_sharp:.2e}, mixed {d_v12:.2e}, rect {d_star:.2e}"
        ),
        start.elapsed().as_secs_f64(),
        60.0,
    );
    assert!(ok);
}

#[test]
fn criterion_5_comb_chain() {
    let start = Instant::now();
    let lambda = LambdaSequence::harmonic();
    let p = ExponentSequence::loglog();
    let sel = select_comb_indices(&lambda, &p, 4, 1_000_000).expect("selection exists");
    let f = build_comb_tensor(&sel).unwrap();

    // (i) upper certificate strictly below 4
    let upper = comb_sharp_upper(&sel, &lambda).unwrap();
    let upper_ok = upper.total < 4.0;

    // (ii) consecutive witness growth at least 1.5
    let mut growth_ok = true;
    let mut min_growth = f64::INFINITY;
    let mut prev: Option<f64> = None;
    for k in sel.term_indices() {
        let w = comb_witness_lower(&sel, &p, k).unwrap();
        if let Some(p_ln) = prev {
            let g = (w.value.ln - p_ln).exp();
            min_growth = min_growth.min(g);
            growth_ok &= g >= 1.5;
        }
        prev = Some(w.value.ln);
    }

    // (iii) randomized partition inequality at the second selected level
    let n2 = sel.entry(2).unwrap().n as u32;
    let rep = partition_inequality_check(&f, &lambda, &p, n2, 200, 42, upper.total).unwrap();
    let ineq_ok = rep.max_ratio <= 1.0 && rep.violations.is_empty();

    let ok = report(
        5,
        upper_ok && growth_ok && ineq_ok,
        &format!(
            "upper {:.4} < 4, min growth {:.2e} >= 1.5, max partition ratio {:.2e} <= 1 at n = {}",
            upper.total, min_growth, rep.max_ratio, n2
        ),
        start.elapsed().as_secs_f64(),
        60.0,
    );
    assert!(ok);
}

#[test]
fn criterion_6_tent_chain() {
    let start = Instant::now();
    let lambda = LambdaSequence::harmonic();
    let p = ExponentSequence::linear_identity();
    let levels = select_tent_levels(&p, 6).unwrap();
    let f = build_tent_tensor(&lambda, &levels).unwrap();

    // (i) lower witnesses dominate the sqrt bound; equality at k = 1
    let mut lower_ok = true;
    let mut increasing_ok = true;
    let mut prev_sum = 0.0;
    for k in 1..=6 {
        let w = tent_sharp_lower(&lambda, &levels, k).unwrap();
        lower_ok &= w.sum >= w.bound - 1e-12;
        if k == 1 {
            lower_ok &= (w.sum - 1.0).abs() <= 1e-12 && (w.bound - 1.0).abs() <= 1e-12;
        }
        increasing_ok &= w.sum > prev_sum;
        prev_sum = w.sum;
    }

    // (iii) certificates under 4e and the DP under the certificates
    let budget = SearchBudget { grid_depth: 8, max_intervals: 8, restarts: 2, seed: 42 };
    let four_e = 4.0 * std::f64::consts::E;
    let mut cert_ok = true;
    let mut dp_ok = true;
    let mut max_cert = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    for l in 0..=12u64 {
        let cert = tent_wiener_upper(&lambda, &p, &levels, l).unwrap();
        cert_ok &= cert.value <= four_e + 1e-9;
        max_cert = max_cert.max(cert.value);
        if l >= 1 {
            let est = wiener_sharp_v1(&f, &p, l as u32, &budget);
            max_excess = max_excess.max(est.value - cert.value);
            dp_ok &= est.value <= cert.value + 1e-9;
        }
    }

    // (iv) sampled continuity against the slope bound
    let bound = tent_lipschitz_bound(&lambda, &levels).unwrap();
    let delta = 1e-4;
    let mut max_slope = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..4000 {
        let x = rng.gen::<f64>();
        let y = rng.gen::<f64>();
        max_slope = max_slope.max((f.eval(x + delta, y) - f.eval(x, y)).abs() / delta);
        max_slope = max_slope.max((f.eval(x, y + delta) - f.eval(x, y)).abs() / delta);
    }
    let lip_ok = max_slope <= bound * (1.0 + 1e-9);

    let ok = report(
        6,
        lower_ok && increasing_ok && cert_ok && dp_ok && lip_ok,
        &format!(
            "witness floor ok, max certificate {max_cert:.4} <= {four_e:.6}, DP excess {max_excess:.2e}, slope {max_slope:.1} <= {bound:.1}"
        ),
        start.elapsed().as_secs_f64(),
        60.0,
    );
    assert!(ok);
}

#[test]
fn criterion_7_condition_fidelity() {
    let start = Instant::now();
    let lambda = LambdaSequence::harmonic();
    let bounded = check_ratio_limsup(&lambda, &ExponentSequence::linear_identity(), 20).unwrap();
    let bounded_ok = bounded.verdict == Verdict::BoundedTrend
        && bounded.sup_observed >= 1.30
        && bounded.sup_observed <= 1.37;
    let divergent = check_ratio_limsup(&lambda, &ExponentSequence::loglog(), 20).unwrap();
    let divergent_ok = divergent.verdict == Verdict::DivergentTrend;
    let ok = report(
        7,
        bounded_ok && divergent_ok,
        &format!(
            "identity exponent: {} (sup {:.4}); loglog exponent: {}",
            bounded.verdict, bounded.sup_observed, divergent.verdict
        ),
        start.elapsed().as_secs_f64(),
        5.0,
    );
    assert!(ok);
}

#[test]
fn criterion_8_verify_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_gvar");
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = std::process::Command::new(bin)
            .args(["verify", "--seed", "42", "--out"])
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "verify run failed");
    }
    let mut identical = true;
    let mut names: Vec<String> = std::fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in &names {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        identical &= a == b;
    }
    let ok = report(
        8,
        identical,
        &format!("two seeded verify runs, {} files byte-identical", names.len()),
        start.elapsed().as_secs_f64(),
        120.0,
    );
    assert!(ok);
}
