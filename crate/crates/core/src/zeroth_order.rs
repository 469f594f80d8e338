//! Perturbation distributions, diminishing step-size schedules, and the
//! two-point randomized-difference gradient estimator.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

/// Bounded symmetric perturbations with bounded reciprocal and exactly
/// zero-mean reciprocal. Gaussian draws are deliberately not offered: their
/// reciprocal is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationDist {
    /// Uniform on `{-1, +1}`.
    Rademacher,
    /// Uniform on `{-a, +a}` for `a > 0`.
    SymmetricTwoPoint { magnitude: f64 },
}

impl PerturbationDist {
    pub fn symmetric_two_point(magnitude: f64) -> Result<Self, Error> {
        if !magnitude.is_finite() || magnitude <= 0.0 {
            return Err(Error::InvalidProblem(format!(
                "two-point magnitude must be positive and finite, got {magnitude}"
            )));
        }
        Ok(Self::SymmetricTwoPoint { magnitude })
    }

    /// Bound on `|delta|`.
    pub fn bound_m1(&self) -> f64 {
        match self {
            Self::Rademacher => 1.0,
            Self::SymmetricTwoPoint { magnitude } => *magnitude,
        }
    }

    /// Bound on `|1/delta|`.
    pub fn inv_bound_m2(&self) -> f64 {
        match self {
            Self::Rademacher => 1.0,
            Self::SymmetricTwoPoint { magnitude } => 1.0 / magnitude,
        }
    }

    /// A vector of i.i.d. draws, one per coordinate.
    pub fn draw(&self, dim: usize, rng: &mut impl Rng) -> Vec<f64> {
        let a = self.bound_m1();
        (0..dim)
            .map(|_| if rng.random::<bool>() { a } else { -a })
            .collect()
    }
}

/// The diminishing schedules `iota(k) = (k+1)^-(1-epsilon)` and
/// `c(k) = (k+1)^-delta`.
///
/// Evaluation uses `k+1` so that iteration 0 is defined; the parameter
/// window `0 <= epsilon < 1/4`, `epsilon < delta < 1/2 - epsilon` makes
/// `sum iota` diverge while `sum iota^2`, `sum iota*c`, and `sum (iota/c)^2
/// * c^2`-type terms stay summable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    epsilon: f64,
    delta: f64,
}

impl StepSchedule {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, Error> {
        if !epsilon.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidStepParams(
                "epsilon and delta must be finite".into(),
            ));
        }
        if epsilon < 0.0 {
            return Err(Error::InvalidStepParams(format!(
                "epsilon >= 0 violated (epsilon = {epsilon})"
            )));
        }
        if epsilon >= 0.25 {
            return Err(Error::InvalidStepParams(format!(
                "epsilon < 1/4 violated (epsilon = {epsilon})"
            )));
        }
        if delta <= epsilon {
            return Err(Error::InvalidStepParams(format!(
                "epsilon < delta violated (epsilon = {epsilon}, delta = {delta})"
            )));
        }
        if delta >= 0.5 - epsilon {
            return Err(Error::InvalidStepParams(format!(
                "delta < 1/2 - epsilon violated (delta = {delta}, bound = {})",
                0.5 - epsilon
            )));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Descent step size at iteration `k` (0-based).
    pub fn step_size(&self, k: usize) -> f64 {
        ((k + 1) as f64).powf(-(1.0 - self.epsilon))
    }

    /// Difference scale `c(k)` used for the two perturbed evaluations.
    pub fn diff_scale(&self, k: usize) -> f64 {
        ((k + 1) as f64).powf(-self.delta)
    }
}

/// One two-point estimate: the direction plus the raw measurements that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub d: Vec<f64>,
    pub y_plus: f64,
    pub y_minus: f64,
    pub delta: Vec<f64>,
}

/// Two-point randomized difference: perturb `x` by `c_k * delta` both ways,
/// evaluate the scalar oracle, and divide the gap elementwise by
/// `2 * c_k * delta_q`.
pub fn randomized_difference<F>(
    f: F,
    x: &[f64],
    c_k: f64,
    dist: &PerturbationDist,
    rng: &mut impl Rng,
) -> Result<GradientEstimate, Error>
where
    F: Fn(&[f64]) -> f64,
{
    if !c_k.is_finite() || c_k <= 0.0 {
        return Err(Error::InvalidStepParams(format!(
            "difference scale must be positive, got {c_k}"
        )));
    }
    let delta = dist.draw(x.len(), rng);
    let plus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + c_k * d).collect();
    let minus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v - c_k * d).collect();
    let y_plus = f(&plus);
    let y_minus = f(&minus);
    if !y_plus.is_finite() || !y_minus.is_finite() {
        return Err(Error::NonFiniteOracle);
    }
    let gap = y_plus - y_minus;
    let d = delta
        .iter()
        .map(|dq| gap / (2.0 * c_k * dq))
        .collect();
    Ok(GradientEstimate {
        d,
        y_plus,
        y_minus,
        delta,
    })
}

/// Per-agent, per-iteration RNG stream. Keyed construction makes runs
/// reproducible regardless of evaluation order.
pub fn agent_stream(seed: u64, agent: u64, iteration: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&agent.to_le_bytes());
    key[16..24].copy_from_slice(&iteration.to_le_bytes());
    key[24..32].copy_from_slice(b"zoagent\0");
    ChaCha8Rng::from_seed(key)
}

/// Partial sums of the step-size series up to a horizon, with flags for the
/// expected summability pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDiagnostics {
    pub horizon: usize,
    pub sum_step: f64,
    pub sum_step_sq: f64,
    pub sum_step_times_scale: f64,
    pub sum_ratio_sq: f64,
    /// Tail increment of `sum step^2` below 1e-7.
    pub step_sq_converging: bool,
    /// `sum step` still growing at the tail (divergence signature).
    pub step_diverging: bool,
}

pub fn schedule_diagnostics(s: &StepSchedule, horizon: usize) -> ScheduleDiagnostics {
    assert!(horizon >= 1, "diagnostics need at least one iteration");
    let mut sum_step = 0.0;
    let mut sum_step_sq = 0.0;
    let mut sum_step_times_scale = 0.0;
    let mut sum_ratio_sq = 0.0;
    let mut first_half = 0.0;
    let mut second_half = 0.0;
    for k in 0..horizon {
        let step = s.step_size(k);
        let scale = s.diff_scale(k);
        sum_step += step;
        sum_step_sq += step * step;
        sum_step_times_scale += step * scale;
        sum_ratio_sq += (step / scale) * (step / scale);
        if k < horizon / 2 {
            first_half += step;
        } else {
            second_half += step;
        }
    }
    ScheduleDiagnostics {
        horizon,
        sum_step,
        sum_step_sq,
        sum_step_times_scale,
        sum_ratio_sq,
        step_sq_converging: s.step_size(horizon).powi(2) < 1e-7,
        // a summable tail shrinks relative to the head; a divergent one does not
        step_diverging: second_half > 0.05 * first_half,
    }
}
