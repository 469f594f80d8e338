//! Self-check suites with fixed seeds: projection geometry, network mixing,
//! perturbation moments, and gradient-estimator accuracy.

use intervalopt::{
    agent_stream, fig2_schedule, mixing_rate_estimate, randomized_difference,
    transition_product, ConstraintSet, MixingEstimate, PerturbationDist,
};
use rand::Rng;

pub const SUITES: [&str; 4] = ["projection", "mixing", "perturbation", "estimator"];

pub fn run_suite(name: &str) -> Result<String, String> {
    match name {
        "projection" => projection(),
        "mixing" => mixing(),
        "perturbation" => perturbation(),
        "estimator" => estimator(),
        other => Err(format!("unknown suite {other:?}")),
    }
}

fn projection() -> Result<String, String> {
    let sets = [
        ConstraintSet::ball(vec![0.0, 0.0, 1.0], 2.5).map_err(|e| e.to_string())?,
        ConstraintSet::hyper_box(vec![-1.0, 0.0, -3.0], vec![2.0, 0.5, 3.0])
            .map_err(|e| e.to_string())?,
    ];
    let mut rng = agent_stream(2024, 0, 0);
    let mut checked = 0usize;
    for set in &sets {
        for _ in 0..2_000 {
            let x: Vec<f64> = (0..set.dim())
                .map(|_| (rng.random::<f64>() - 0.5) * 12.0)
                .collect();
            let y: Vec<f64> = (0..set.dim())
                .map(|_| (rng.random::<f64>() - 0.5) * 12.0)
                .collect();
            let px = set.project(&x).map_err(|e| e.to_string())?;
            let py = set.project(&y).map_err(|e| e.to_string())?;
            let dot: f64 = x
                .iter()
                .zip(&px)
                .zip(py.iter().zip(&px))
                .map(|((xi, pxi), (pyi, pxi2))| (xi - pxi) * (pyi - pxi2))
                .sum();
            if dot > 1e-9 {
                return Err(format!("supporting-hyperplane inequality violated: {dot}"));
            }
            let d_p: f64 = px
                .iter()
                .zip(&py)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let d_xy: f64 = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d_p > d_xy + 1e-9 {
                return Err(format!("projection expanded a distance: {d_p} > {d_xy}"));
            }
            if set.project(&px).map_err(|e| e.to_string())? != px {
                return Err("projection is not idempotent".into());
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} random pairs over ball and box"))
}

fn mixing() -> Result<String, String> {
    let s = fig2_schedule();
    let dev = transition_product(&s, 200, 0)
        .map_err(|e| e.to_string())?
        .max_deviation();
    if dev >= 1e-6 {
        return Err(format!("deviation at k=200 is {dev}, expected < 1e-6"));
    }
    match mixing_rate_estimate(&s, 60).map_err(|e| e.to_string())? {
        MixingEstimate::Geometric { beta_hat, .. } if beta_hat < 1.0 => {
            Ok(format!("deviation(200) = {dev:.2e}, beta = {beta_hat:.3}"))
        }
        MixingEstimate::Geometric { beta_hat, .. } => {
            Err(format!("fitted rate {beta_hat} is not below 1"))
        }
        MixingEstimate::Exact => Ok(format!("deviation(200) = {dev:.2e}, exact mixing")),
    }
}

fn perturbation() -> Result<String, String> {
    let mut rng = agent_stream(2025, 0, 0);
    let dist = PerturbationDist::Rademacher;
    let n = 100_000usize;
    let mut sum = 0.0;
    let mut sum_inv = 0.0;
    for _ in 0..n {
        let d = dist.draw(1, &mut rng)[0];
        if d.abs() > dist.bound_m1() + 1e-15 {
            return Err(format!("draw {d} exceeds the stated magnitude bound"));
        }
        if (1.0 / d.abs()) > dist.inv_bound_m2() + 1e-15 {
            return Err(format!("1/|{d}| exceeds the stated reciprocal bound"));
        }
        sum += d;
        sum_inv += 1.0 / d;
    }
    let mean = sum / n as f64;
    let mean_inv = sum_inv / n as f64;
    if mean.abs() > 0.02 || mean_inv.abs() > 0.02 {
        return Err(format!(
            "symmetry violated: mean = {mean:.4}, reciprocal mean = {mean_inv:.4}"
        ));
    }
    Ok(format!(
        "{n} draws, mean = {mean:.1e}, reciprocal mean = {mean_inv:.1e}"
    ))
}

fn estimator() -> Result<String, String> {
    // Exact on one-dimensional quadratics for every draw.
    let mut rng = agent_stream(2026, 0, 0);
    for t in 0..500 {
        let x = -3.0 + t as f64 * 0.012;
        let est = randomized_difference(
            |p: &[f64]| 2.0 * p[0] * p[0] + p[0] - 4.0,
            &[x],
            0.25,
            &PerturbationDist::Rademacher,
            &mut rng,
        )
        .map_err(|e| e.to_string())?;
        let exact = 4.0 * x + 1.0;
        if (est.d[0] - exact).abs() > 1e-12 * (1.0 + exact.abs()) {
            return Err(format!(
                "one-dimensional estimate {} differs from slope {exact}",
                est.d[0]
            ));
        }
    }
    // Mean over many draws approximates the gradient in three dimensions.
    let f = |p: &[f64]| p[0] * p[0] + 2.0 * p[1] * p[1] + 3.0 * p[2] * p[2] - p[0];
    let x = [1.0, -0.5, 0.25];
    let grad = [1.0, -2.0, 1.5];
    let n = 50_000usize;
    let mut sums = [0.0f64; 3];
    for _ in 0..n {
        let est = randomized_difference(f, &x, 0.05, &PerturbationDist::Rademacher, &mut rng)
            .map_err(|e| e.to_string())?;
        for q in 0..3 {
            sums[q] += est.d[q];
        }
    }
    for q in 0..3 {
        let mean = sums[q] / n as f64;
        if (mean - grad[q]).abs() > 0.05 {
            return Err(format!(
                "coordinate {q}: mean estimate {mean:.4} is far from gradient {}",
                grad[q]
            ));
        }
    }
    Ok("exact in one dimension, mean-accurate in three".into())
}
