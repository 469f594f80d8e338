//! End-to-end acceptance checks: the 5-agent reproduction run, Pareto-front
//! recovery, estimator exactness, network mixing, projection contracts,
//! consensus, and the regret trend. Each test prints one pass line.

use std::sync::Arc;
use std::time::Instant;

use intervalopt::{
    agent_stream, designed_pareto_problem, fig2_schedule, five_agent_quadratic,
    mixing_rate_estimate, pareto_sweep, randomized_difference, rate_fit, run,
    transition_product, ConstraintSet, MixingEstimate, PerturbationDist, RunConfig,
    StepSchedule,
};

fn five_agent_config(seed: u64, iterations: usize) -> RunConfig {
    RunConfig {
        problem: Arc::new(five_agent_quadratic()),
        schedule: Arc::new(fig2_schedule()),
        steps: StepSchedule::new(0.125, 0.25).unwrap(),
        dist: PerturbationDist::Rademacher,
        iterations,
        lambda0: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        x0: vec![vec![0.0]; 5],
        seed,
    }
}

#[test]
fn criterion_1_five_agent_reproduction() {
    let start = Instant::now();
    // (a) lambda consensus to the initial mean at T = 500
    let record = run(&five_agent_config(1, 500)).unwrap();
    for a in record.final_states() {
        assert!(
            (a.lambda - 0.500).abs() < 1e-6,
            "lambda did not reach 0.500: {}",
            a.lambda
        );
    }
    // (b) 20-seed mean of the final network average
    let mut mean = 0.0;
    for seed in 1..=20u64 {
        let r = run(&five_agent_config(seed, 500)).unwrap();
        mean += r.mean_x(500)[0];
    }
    mean /= 20.0;
    assert!(
        (0.9..=1.1).contains(&mean),
        "20-seed mean x at T=500 is {mean}, outside [0.9, 1.1]"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 five-agent reproduction: PASS (mean x = {mean:.4}, {elapsed:?})");
}

#[test]
fn criterion_2_pareto_front_recovery() {
    let start = Instant::now();
    let problem = designed_pareto_problem();
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let front = pareto_sweep(&problem, &grid).unwrap();
    assert_eq!(front.len(), 9);
    for pt in &front {
        let expected = 3.0 - 2.0 * pt.lambda;
        assert!(
            (pt.x_star[0] - expected).abs() < 1e-3,
            "x*({}) = {}, expected {expected}",
            pt.lambda,
            pt.x_star[0]
        );
        assert!(pt.pareto, "sweep solution at lambda {} dominated", pt.lambda);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 2.0, "took {elapsed:?}");
    println!("ACCEPTANCE 2 pareto-front recovery: PASS ({elapsed:?})");
}

#[test]
fn criterion_3_estimator_exactness_and_unbiasedness() {
    let start = Instant::now();
    // 1-D quadratic: exact for every draw
    let mut rng = agent_stream(100, 0, 0);
    for t in 0..1_000 {
        let x = -5.0 + t as f64 * 0.01;
        let est = randomized_difference(
            |p: &[f64]| 1.5 * p[0] * p[0] - 2.0 * p[0] + 0.5,
            &[x],
            0.3,
            &PerturbationDist::Rademacher,
            &mut rng,
        )
        .unwrap();
        let exact = 3.0 * x - 2.0;
        assert!((est.d[0] - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }
    // p = 5 quadratic: Monte Carlo mean within 3 standard errors
    let grad = [2.0, -4.0, 0.0, 6.0, 1.0];
    let f = |p: &[f64]| {
        p.iter().map(|v| v * v).sum::<f64>() + 2.0 * p[0] - 4.0 * p[1] + 6.0 * p[3] + p[4]
    };
    let x = [0.0; 5];
    let samples = 100_000usize;
    let mut sums = [0.0f64; 5];
    let mut sq_sums = [0.0f64; 5];
    let mut rng = agent_stream(101, 0, 0);
    for _ in 0..samples {
        let est =
            randomized_difference(f, &x, 0.1, &PerturbationDist::Rademacher, &mut rng).unwrap();
        for q in 0..5 {
            sums[q] += est.d[q];
            sq_sums[q] += est.d[q] * est.d[q];
        }
    }
    for q in 0..5 {
        let mean = sums[q] / samples as f64;
        let var = sq_sums[q] / samples as f64 - mean * mean;
        let se = (var / samples as f64).sqrt();
        assert!(
            (mean - grad[q]).abs() <= 3.0 * se,
            "coordinate {q}: mean {mean} vs gradient {} (3se = {})",
            grad[q],
            3.0 * se
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("ACCEPTANCE 3 estimator exactness/unbiasedness: PASS ({elapsed:?})");
}

#[test]
fn criterion_4_mixing() {
    let start = Instant::now();
    let s = fig2_schedule();
    let dev200 = transition_product(&s, 200, 0).unwrap().max_deviation();
    assert!(dev200 < 1e-6, "deviation at k=200 is {dev200}");
    let (mu, beta) = match mixing_rate_estimate(&s, 60).unwrap() {
        MixingEstimate::Geometric { mu_hat, beta_hat } => (mu_hat, beta_hat),
        MixingEstimate::Exact => panic!("fig2 mixing is geometric"),
    };
    assert!(beta < 1.0, "beta = {beta}");
    for k in 0..=60usize {
        let err = transition_product(&s, k, 0).unwrap().max_deviation();
        assert!(err <= 1.1 * mu * beta.powi(k as i32) + 1e-14);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 4 mixing: PASS (beta = {beta:.4}, {elapsed:?})");
}

#[test]
fn criterion_5_projection_contracts() {
    let start = Instant::now();
    let tol = 1e-9;
    let sets = [
        ConstraintSet::ball(vec![0.5, -1.0], 3.0).unwrap(),
        ConstraintSet::hyper_box(vec![-2.0, 0.0], vec![1.0, 4.0]).unwrap(),
    ];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let sub = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>()
    };
    for set in &sets {
        let mut rng = agent_stream(55, 0, 0);
        for _ in 0..10_000 {
            let rnd = |rng: &mut rand_chacha::ChaCha8Rng| {
                (0..set.dim())
                    .map(|_| (rand::Rng::random::<f64>(rng) - 0.5) * 20.0)
                    .collect::<Vec<f64>>()
            };
            let x = rnd(&mut rng);
            let y_raw = rnd(&mut rng);
            let px = set.project(&x).unwrap();
            let py = set.project(&y_raw).unwrap();
            assert!(dot(&sub(&x, &px), &sub(&py, &px)) <= tol);
            let d_p = dot(&sub(&px, &py), &sub(&px, &py));
            let d_xy = dot(&sub(&x, &y_raw), &sub(&x, &y_raw));
            assert!(d_p.sqrt() <= d_xy.sqrt() + tol);
            assert!(dot(&sub(&x, &y_raw), &sub(&py, &px)) <= -d_p + tol);
            let d_xpx = dot(&sub(&x, &px), &sub(&x, &px));
            let d_ypx = dot(&sub(&py, &px), &sub(&py, &px));
            let d_xpy = dot(&sub(&x, &py), &sub(&x, &py));
            assert!(d_xpx + d_ypx <= d_xpy + tol);
            assert_eq!(set.project(&px).unwrap(), px, "idempotence must be exact");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 5 projection contracts: PASS ({elapsed:?})");
}

#[test]
fn criterion_6_consensus() {
    let start = Instant::now();
    let mut err_500 = 0.0;
    let mut err_50 = 0.0;
    for seed in 1..=10u64 {
        let r = run(&five_agent_config(seed, 500)).unwrap();
        err_500 += r.metrics[500].consensus_error;
        err_50 += r.metrics[50].consensus_error;
    }
    err_500 /= 10.0;
    err_50 /= 10.0;
    assert!(err_500 < 0.05, "consensus error at T=500 is {err_500}");
    assert!(
        err_500 < err_50,
        "consensus error did not shrink: {err_500} vs {err_50} at T=50"
    );
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 6 consensus: PASS (err(500) = {err_500:.2e} < err(50) = {err_50:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_7_regret_trend() {
    let start = Instant::now();
    let horizons: Vec<usize> = (1..=50).map(|i| i * 100).collect();
    let mut mean_curve = vec![0.0f64; horizons.len()];
    for seed in 1..=10u64 {
        let r = run(&five_agent_config(seed, 5_000)).unwrap();
        for (slot, &t) in mean_curve.iter_mut().zip(&horizons) {
            *slot += r.metrics[t].regret_running;
        }
    }
    for v in &mut mean_curve {
        *v /= 10.0;
    }
    let curve: Vec<(f64, f64)> = horizons
        .iter()
        .map(|&t| t as f64)
        .zip(mean_curve.iter().copied())
        .collect();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    let fit = rate_fit(&curve);
    let r_first = mean_curve[0];
    let r_last = mean_curve[horizons.len() - 1];
    let slope_ok = matches!(&fit, Ok(f) if f.slope <= -0.05);
    let trend_ok = r_last < r_first;
    println!(
        "ACCEPTANCE 7 regret trend: {} (fit = {fit:?}, R(100) = {r_first:.3e}, R(5000) = {r_last:.3e}, {elapsed:?})",
        if slope_ok && trend_ok { "PASS" } else { "FAIL" },
    );
    // The time-averaged gap against the centralized optimum is negative on
    // this instance: each agent's iterate sits slightly downhill of its own
    // local objective, so the summed gap undershoots the optimum while its
    // magnitude decays to zero. A log-log fit needs positive values, so the
    // check below cannot pass as stated; the magnitude-decay property is
    // covered separately in the properties suite.
    let fit = fit.expect("log-log fit needs at least 10 positive regret values");
    assert!(
        fit.slope <= -0.05,
        "log-log slope {} is not at most -0.05",
        fit.slope
    );
    assert!(trend_ok, "R(5000) = {r_last} not below R(100) = {r_first}");
}
