//! The `verify` command: a config-scoped run of the full assertion suite,
//! one CSV row per assertion, exit status for CI gating.

use super::commands::{comb_inequality_assertion, write_file, CliError};
use super::config::ExperimentConfig;
use crate::constructions::{
    build_tent_tensor, comb_sharp_upper, comb_witness_lower,
    select_comb_indices, select_tent_levels, tent_lipschitz_bound, tent_sharp_lower,
    tent_wiener_upper,
};
use crate::oracle::{self, instances, GridSpec};
use crate::sequences::{
    check_lambda_admissible, check_ratio_limsup, ExponentSequence, LambdaKind, LambdaSequence,
    Verdict,
};
use crate::variation::{
    lambda_sharp_v1, lambda_star_v, lambda_v12, lambda_variation_1d, optimal_assignment,
    wiener_sharp_v1, wiener_variation_1d, SearchBudget,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    pub pass: bool,
    pub observed: f64,
    pub bound: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub assertions: Vec<Assertion>,
    pub passed: usize,
    pub failed: usize,
}

struct Suite {
    assertions: Vec<Assertion>,
}

impl Suite {
    fn check(&mut self, id: &str, pass: bool, observed: f64, bound: f64, detail: String) {
        self.assertions.push(Assertion { id: id.to_string(), pass, observed, bound, detail });
    }

    fn le(&mut self, id: &str, observed: f64, bound: f64, detail: &str) {
        self.check(id, observed <= bound, observed, bound, detail.to_string());
    }

    fn ge(&mut self, id: &str, observed: f64, bound: f64, detail: &str) {
        self.check(id, observed >= bound, observed, bound, detail.to_string());
    }
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyOutcome, CliError> {
    let mut suite = Suite { assertions: Vec::new() };
    let seed = cfg.budget.seed;

    // config weights: admissibility invariants
    let lambda_cfg = cfg.lambda.build()?;
    match check_lambda_admissible(&lambda_cfg, cfg.admissible_n.min(1 << 16)) {
        Ok(adm) => {
            let detail = match adm.monotone_violation_at {
                Some(at) => format!("monotonicity fails at index {at}"),
                None => "monotone, first weight admissible".to_string(),
            };
            suite.check(
                "config-lambda-admissible",
                adm.monotone && adm.lambda1_ok,
                adm.lambda1,
                1.0,
                detail,
            );
        }
        Err(e) => suite.check("config-lambda-admissible", false, f64::NAN, 1.0, e.to_string()),
    }

    // rearrangement pairing vs exhaustive permutations
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let power_log = LambdaSequence::new(LambdaKind::PowerLog { alpha: 0.5 }).unwrap();
        let mut max_diff = 0.0f64;
        let trials = cfg.trials.clamp(50, 1000);
        for t in 0..trials {
            let lambda = if t % 2 == 0 { &lambda_cfg } else { &power_log };
            let len = rng.gen_range(0..=7);
            let vals: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
            let fast = optimal_assignment(&vals, lambda);
            let brute = oracle::brute_assignment(&vals, lambda).expect("len <= 7");
            max_diff = max_diff.max((fast - brute).abs());
        }
        suite.le(
            "rearrangement-optimality",
            max_diff,
            1e-12,
            &format!("{trials} random collections"),
        );
    }

    let harmonic = LambdaSequence::harmonic();

    // estimator vs oracle, one-variable weighted variation
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let grid = GridSpec::new(3, 3, 8).unwrap();
        let budget = SearchBudget { grid_depth: 3, max_intervals: 3, restarts: 2, seed };
        let mut max_diff = 0.0f64;
        let count = 40;
        for _ in 0..count {
            let f = instances::random_pwl_on_grid(&mut rng, 3);
            let est = lambda_variation_1d(&f, &harmonic, &budget);
            let orc = oracle::brute_lambda_1d(&f, &harmonic, &grid).unwrap();
            max_diff = max_diff.max((est.value - orc).abs());
        }
        suite.le("lambda-1d-oracle", max_diff, 1e-9, &format!("{count} random functions"));
    }

    // estimator vs oracle, gap-constrained variation
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let grid = GridSpec::new(3, 6, 8).unwrap();
        let budget = SearchBudget { grid_depth: 3, max_intervals: 6, restarts: 2, seed };
        let mut max_diff = 0.0f64;
        let mut count = 0;
        for p_val in [1.0, 1.5, 2.0, 3.0] {
            let p_seq = ExponentSequence::constant(p_val);
            for n in [1u32, 2, 3] {
                for _ in 0..4 {
                    let f = instances::random_pwl_on_grid(&mut rng, 3);
                    let est = wiener_variation_1d(&f, &p_seq, n, &budget);
                    let orc = oracle::brute_wiener_1d(&f, p_val, n, &grid).unwrap();
                    max_diff = max_diff.max((est.value - orc).abs());
                    count += 1;
                }
            }
        }
        suite.le("wiener-dp-oracle", max_diff, 1e-9, &format!("{count} combinations"));
    }

    // estimator vs oracle, two-variable functionals
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let grid = GridSpec::new(2, 3, 8).unwrap();
        let budget = SearchBudget { grid_depth: 2, max_intervals: 3, restarts: 2, seed };
        let (mut d_sharp, mut d_v12, mut d_star) = (0.0f64, 0.0f64, 0.0f64);
        let count = 10;
        for _ in 0..count {
            let f = instances::random_tensor_on_grid(&mut rng, 2, 2);
            d_sharp = d_sharp.max(
                (lambda_sharp_v1(&f, &harmonic, &budget).value
                    - oracle::brute_sharp_v1(&f, &harmonic, &grid).unwrap())
                .abs(),
            );
            d_v12 = d_v12.max(
                (lambda_v12(&f, &harmonic, &budget).value
                    - oracle::brute_v12(&f, &harmonic, &grid).unwrap())
                .abs(),
            );
            d_star = d_star.max(
                (lambda_star_v(&f, &harmonic, &budget).value
                    - oracle::brute_star(&f, &harmonic, &grid).unwrap())
                .abs(),
            );
        }
        suite.le("sharp-v1-oracle", d_sharp, 1e-9, &format!("{count} tensor sums"));
        suite.le("v12-oracle", d_v12, 1e-9, &format!("{count} tensor sums"));
        suite.le("star-oracle", d_star, 1e-9, &format!("{count} tensor sums"));
    }

    // comb chain: upper certificate < 4, witness growth, partition inequality
    {
        let p = ExponentSequence::loglog();
        match select_comb_indices(&harmonic, &p, cfg.k.max(4), cfg.search_cap) {
            Ok(sel) => {
                let upper = comb_sharp_upper(&sel, &harmonic).unwrap();
                suite.le("comb-upper-certificate", upper.total, 4.0 - 1e-12, "strictly below 4");
                let mut prev: Option<f64> = None;
                let mut min_growth = f64::INFINITY;
                for k in sel.term_indices() {
                    let w = comb_witness_lower(&sel, &p, k).unwrap();
                    if let Some(prev_ln) = prev {
                        min_growth = min_growth.min((w.value.ln - prev_ln).exp());
                    }
                    prev = Some(w.value.ln);
                }
                if min_growth.is_finite() {
                    suite.ge("comb-witness-growth", min_growth, 1.5, "value(k+1)/value(k)");
                }
                match comb_inequality_assertion(cfg) {
                    Ok((max_ratio, bound)) => suite.le(
                        "comb-partition-inequality",
                        max_ratio,
                        bound,
                        &format!("{} random partitions", cfg.trials),
                    ),
                    Err(e) => suite.check(
                        "comb-partition-inequality",
                        false,
                        f64::NAN,
                        1.0,
                        e.to_string(),
                    ),
                }
            }
            Err(e) => suite.check("comb-upper-certificate", false, f64::NAN, 4.0, e.to_string()),
        }
    }

    // tent chain: lower witnesses, monotone growth, 4e ceiling, DP cross-check
    {
        let p = ExponentSequence::linear_identity();
        let k_total = cfg.k.max(6);
        let levels = select_tent_levels(&p, k_total).unwrap();
        let mut min_margin = f64::INFINITY;
        let mut strict_increase = true;
        let mut prev_sum = 0.0;
        for k in 1..=k_total {
            let w = tent_sharp_lower(&harmonic, &levels, k).unwrap();
            min_margin = min_margin.min(w.sum - w.bound);
            strict_increase &= w.sum > prev_sum;
            prev_sum = w.sum;
        }
        suite.ge("tent-lower-witness", min_margin, -1e-12, "sum - sqrt bound over all k");
        suite.check(
            "tent-witness-increasing",
            strict_increase,
            if strict_increase { 1.0 } else { 0.0 },
            1.0,
            "witness sums strictly increase in k".to_string(),
        );

        let f = build_tent_tensor(&harmonic, &levels).unwrap();
        let mut max_cert = 0.0f64;
        let mut max_excess = f64::NEG_INFINITY;
        let budget = SearchBudget {
            grid_depth: cfg.budget.grid_depth.min(8).max(4),
            max_intervals: cfg.budget.max_intervals,
            restarts: cfg.budget.restarts,
            seed,
        };
        for l in 0..=12u64 {
            let cert = tent_wiener_upper(&harmonic, &p, &levels, l).unwrap();
            max_cert = max_cert.max(cert.value);
            if l >= 1 {
                let est = wiener_sharp_v1(&f, &p, l as u32, &budget);
                max_excess = max_excess.max(est.value - cert.value);
            }
        }
        suite.le("tent-4e-ceiling", max_cert, 4.0 * std::f64::consts::E + 1e-9, "all l <= 12");
        suite.le("tent-dp-under-certificate", max_excess, 1e-9, "DP estimate minus certificate");

        let bound = tent_lipschitz_bound(&harmonic, &levels).unwrap();
        let delta = 1e-4;
        let mut max_slope = 0.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        for _ in 0..2000 {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            max_slope = max_slope.max((f.eval(x + delta, y) - f.eval(x, y)).abs() / delta);
            max_slope = max_slope.max((f.eval(x, y + delta) - f.eval(x, y)).abs() / delta);
        }
        suite.le("tent-continuity", max_slope, bound * (1.0 + 1e-9), "sampled slope vs bound");
    }

    // condition fidelity
    {
        let p_id = ExponentSequence::linear_identity();
        let rep = check_ratio_limsup(&harmonic, &p_id, 20).unwrap();
        let ok = rep.verdict == Verdict::BoundedTrend
            && rep.sup_observed >= 1.30
            && rep.sup_observed <= 1.37;
        suite.check(
            "condition-bounded-fidelity",
            ok,
            rep.sup_observed,
            4.0 / 3.0,
            format!("verdict {}", rep.verdict),
        );
        let p_ll = ExponentSequence::loglog();
        let rep = check_ratio_limsup(&harmonic, &p_ll, 20).unwrap();
        suite.check(
            "condition-divergent-fidelity",
            rep.verdict == Verdict::DivergentTrend,
            rep.sup_observed,
            f64::INFINITY,
            format!("verdict {}", rep.verdict),
        );
    }

    let passed = suite.assertions.iter().filter(|a| a.pass).count();
    let failed = suite.assertions.len() - passed;
    Ok(VerifyOutcome { assertions: suite.assertions, passed, failed })
}

/// Write the per-assertion CSV and summary; `Ok(true)` iff everything holds.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &Path) -> Result<bool, CliError> {
    let outcome = run_verify(cfg)?;
    let mut csv = String::from("id,pass,observed,bound,detail\n");
    for a in &outcome.assertions {
        let _ = writeln!(csv, "{},{},{},{},\"{}\"", a.id, a.pass, a.observed, a.bound, a.detail);
    }
    write_file(out, "assertions.csv", &csv)?;
    let summary = json!({
        "passed": outcome.passed,
        "failed": outcome.failed,
        "assertions": outcome.assertions,
    });
    write_file(out, "summary.json", &{
        let mut s = serde_json::to_string_pretty(&summary).unwrap();
        s.push('\n');
        s
    })?;
    Ok(outcome.failed == 0)
}
