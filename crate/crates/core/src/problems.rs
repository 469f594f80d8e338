//! Concrete problem instances: per-agent interval objectives and convex
//! constraint sets with closed-form Euclidean projection.

use std::sync::Arc;

use crate::error::Error;
use crate::interval::{Interval, IntervalFn, ScalarizationWeight};

/// A non-empty compact convex constraint set with closed-form projection.
///
/// Balls and boxes cover the instances we run; anything else would need an
/// iterative projection and is left out on purpose.
#[derive(Debug, Clone)]
pub enum ConstraintSet {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl ConstraintSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, Error> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidConstraint(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if center.is_empty() || center.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConstraint(
                "ball center must be non-empty and finite".into(),
            ));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn hyper_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, Error> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidConstraint(
                "box bounds must be non-empty and of equal length".into(),
            ));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::InvalidConstraint(format!(
                    "box requires finite lower <= upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { center, .. } => center.len(),
            Self::Box { lower, .. } => lower.len(),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            Self::Ball { center, radius } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
                // the relative margin keeps re-projection an exact fixed point
                if norm <= *radius * (1.0 + 1e-14) {
                    x.to_vec()
                } else {
                    let scale = radius / norm;
                    center
                        .iter()
                        .zip(&diff)
                        .map(|(c, d)| c + scale * d)
                        .collect()
                }
            }
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
        })
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: &[f64]) -> Result<f64, Error> {
        let p = self.project(x)?;
        Ok(x.iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// Axis-aligned bounding box of the set, used by the reference solver.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Self::Box { lower, upper } => (lower.clone(), upper.clone()),
        }
    }

    /// Farthest distance from the origin to a point of the set; the
    /// divergence guard scales with this.
    pub fn extent(&self) -> f64 {
        match self {
            Self::Ball { center, radius } => {
                center.iter().map(|v| v * v).sum::<f64>().sqrt() + radius
            }
            Self::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// A distributed interval optimization instance: `n` agents with interval
/// objectives on a shared constraint set.
#[derive(Clone)]
pub struct IntervalProblem {
    agents: Vec<Arc<dyn IntervalFn>>,
    constraint: ConstraintSet,
    dim: usize,
    lipschitz_hint: Option<f64>,
}

impl IntervalProblem {
    pub fn new(
        agents: Vec<Arc<dyn IntervalFn>>,
        constraint: ConstraintSet,
        lipschitz_hint: Option<f64>,
    ) -> Result<Self, Error> {
        if agents.is_empty() {
            return Err(Error::InvalidProblem("no agents".into()));
        }
        let dim = constraint.dim();
        for (i, g) in agents.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::InvalidProblem(format!(
                    "agent {i} has dim {}, constraint set has dim {dim}",
                    g.dim()
                )));
            }
        }
        Ok(Self {
            agents,
            constraint,
            dim,
            lipschitz_hint,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraint(&self) -> &ConstraintSet {
        &self.constraint
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn agent_value(&self, agent: usize, x: &[f64]) -> Result<Interval, Error> {
        let g = self.agents.get(agent).ok_or(Error::AgentOutOfRange {
            index: agent,
            agents: self.agents.len(),
        })?;
        Ok(g.eval(x))
    }

    /// The scalarized local objective `lambda*L_i(x) + (1-lambda)*R_i(x)`.
    pub fn scalarized_local(&self, agent: usize, x: &[f64], lambda: f64) -> Result<f64, Error> {
        let w = ScalarizationWeight::new(lambda)?;
        Ok(self.agent_value(agent, x)?.scalarize(w))
    }

    /// Sum of the scalarized locals at a common point.
    pub fn scalarized_total(&self, x: &[f64], lambda: f64) -> Result<f64, Error> {
        let mut total = 0.0;
        for i in 0..self.n_agents() {
            total += self.scalarized_local(i, x, lambda)?;
        }
        Ok(total)
    }

    /// Aggregate interval value `[sum L_i(x), sum R_i(x)]` at a common point.
    pub fn aggregate_value(&self, x: &[f64]) -> Result<Interval, Error> {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for g in &self.agents {
            let v = g.eval(x);
            lo += v.lo();
            hi += v.hi();
        }
        Interval::new(lo, hi)
    }
}

struct QuadraticAgent {
    coeff: Interval,
    center: Vec<f64>,
}

impl IntervalFn for QuadraticAgent {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> Interval {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        Interval::new(self.coeff.lo() * sq, self.coeff.hi() * sq)
            .expect("positive coeff keeps lo <= hi")
    }
}

/// Builds the quadratic family `G_i(x) = coeff * ||x - center_i||^2` with a
/// shared interval coefficient. `coeff.lo > 0` keeps both endpoints convex.
pub fn quadratic_interval_problem(
    coeff: Interval,
    centers: &[Vec<f64>],
    constraint: ConstraintSet,
) -> Result<IntervalProblem, Error> {
    if coeff.lo() <= 0.0 {
        return Err(Error::InvalidProblem(format!(
            "quadratic coefficient interval must have lo > 0, got {}",
            coeff.lo()
        )));
    }
    if centers.is_empty() {
        return Err(Error::InvalidProblem("no centers".into()));
    }
    let dim = constraint.dim();
    for c in centers {
        if c.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.len(),
            });
        }
    }
    // |f'| <= 2*hi*||x - center|| <= 2*hi*(extent + max||center||) on the set
    let max_center = centers
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let hint = 2.0 * coeff.hi() * (constraint.extent() + max_center);
    let agents: Vec<Arc<dyn IntervalFn>> = centers
        .iter()
        .map(|c| {
            Arc::new(QuadraticAgent {
                coeff,
                center: c.clone(),
            }) as Arc<dyn IntervalFn>
        })
        .collect();
    IntervalProblem::new(agents, constraint, Some(hint))
}

/// The 5-agent quadratic instance: coefficient `[0.5, 2]`, centers
/// `3, 2, 1, 0, -1`, ball constraint `|x| <= 100`.
pub fn five_agent_quadratic() -> IntervalProblem {
    let coeff = Interval::new(0.5, 2.0).unwrap();
    let centers: Vec<Vec<f64>> = [3.0, 2.0, 1.0, 0.0, -1.0]
        .iter()
        .map(|&c| vec![c])
        .collect();
    let constraint = ConstraintSet::ball(vec![0.0], 100.0).unwrap();
    quadratic_interval_problem(coeff, &centers, constraint).unwrap()
}

/// A parametric interval function: the envelope of a coefficient family
/// evaluated over the Cartesian grid of the coefficient boxes.
#[derive(Clone)]
pub struct ParametricIntervalSpec {
    pub coefficient_boxes: Vec<Interval>,
    pub family: Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    pub grid_points_per_coeff: usize,
    pub dim: usize,
}

struct GridEnvelope {
    spec: ParametricIntervalSpec,
    grids: Vec<Vec<f64>>,
}

impl IntervalFn for GridEnvelope {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn eval(&self, x: &[f64]) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut coeffs = vec![0.0; self.grids.len()];
        let mut idx = vec![0usize; self.grids.len()];
        loop {
            for (q, g) in self.grids.iter().enumerate() {
                coeffs[q] = g[idx[q]];
            }
            let v = (self.spec.family)(&coeffs, x);
            lo = lo.min(v);
            hi = hi.max(v);
            // odometer over the grid indices
            let mut q = 0;
            loop {
                if q == idx.len() {
                    return Interval::new(lo, hi).expect("min <= max over grid");
                }
                idx[q] += 1;
                if idx[q] < self.grids[q].len() {
                    break;
                }
                idx[q] = 0;
                q += 1;
            }
        }
    }
}

/// Builds the min/max envelope of `family(c, x)` over the grid of the
/// coefficient boxes. Monotone families hit the box corners exactly.
pub fn parametric_interval_fn(spec: ParametricIntervalSpec) -> Result<Arc<dyn IntervalFn>, Error> {
    if spec.grid_points_per_coeff < 2 {
        return Err(Error::InvalidProblem(
            "grid_points_per_coeff must be at least 2".into(),
        ));
    }
    if spec.coefficient_boxes.is_empty() {
        return Err(Error::InvalidProblem("no coefficient boxes".into()));
    }
    let m = spec.grid_points_per_coeff;
    let grids = spec
        .coefficient_boxes
        .iter()
        .map(|b| {
            (0..m)
                .map(|j| b.lo() + (b.hi() - b.lo()) * j as f64 / (m - 1) as f64)
                .collect()
        })
        .collect();
    Ok(Arc::new(GridEnvelope { spec, grids }))
}

struct DesignedParetoAgent;

impl IntervalFn for DesignedParetoAgent {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Interval {
        let t = x[0];
        let lo = (t - 1.0) * (t - 1.0);
        let hi = (t - 3.0) * (t - 3.0) + 5.0;
        // hi - lo = 4(3 - t) + 1 > 0 on [0, 3]
        Interval::new(lo, hi).expect("R dominates L on the domain")
    }
}

/// Single-agent fixture on `X = [0, 3]` with `L(x) = (x-1)^2` and
/// `R(x) = (x-3)^2 + 5`. The scalarized minimizer is `x*(lambda) = 3 - 2*lambda`
/// and the Pareto set is `[1, 3]`.
pub fn designed_pareto_problem() -> IntervalProblem {
    let constraint = ConstraintSet::hyper_box(vec![0.0], vec![3.0]).unwrap();
    IntervalProblem::new(vec![Arc::new(DesignedParetoAgent)], constraint, None).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_examples() {
        let ball = ConstraintSet::ball(vec![0.0], 100.0).unwrap();
        assert_eq!(ball.project(&[150.0]).unwrap(), vec![100.0]);
        assert_eq!(ball.project(&[37.0]).unwrap(), vec![37.0]);
        let bx = ConstraintSet::hyper_box(vec![0.0], vec![3.0]).unwrap();
        assert_eq!(bx.project(&[-1.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn projection_dimension_mismatch() {
        let ball = ConstraintSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            ball.project(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constraint_validation() {
        assert!(ConstraintSet::ball(vec![0.0], 0.0).is_err());
        assert!(ConstraintSet::ball(vec![0.0], -1.0).is_err());
        assert!(ConstraintSet::hyper_box(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn scalarized_local_examples() {
        let p = five_agent_quadratic();
        // agent 0 has center 3: G(0) = [4.5, 18]
        assert_abs_diff_eq!(p.scalarized_local(0, &[0.0], 0.5).unwrap(), 11.25);
        // lambda = 1 gives L exactly
        assert_abs_diff_eq!(p.scalarized_local(0, &[0.0], 1.0).unwrap(), 4.5);
        // agent 2 has center 1: zero interval at its minimizer
        assert_abs_diff_eq!(p.scalarized_local(2, &[1.0], 0.3).unwrap(), 0.0);
        assert!(matches!(
            p.scalarized_local(9, &[0.0], 0.5),
            Err(Error::AgentOutOfRange { .. })
        ));
    }

    #[test]
    fn quadratic_rejects_non_positive_coeff() {
        let coeff = Interval::new(0.0, 2.0).unwrap();
        let constraint = ConstraintSet::ball(vec![0.0], 1.0).unwrap();
        assert!(quadratic_interval_problem(coeff, &[vec![0.0]], constraint).is_err());
    }

    #[test]
    fn quadratic_zero_at_center_and_degenerate_coeff() {
        let p = five_agent_quadratic();
        let v = p.agent_value(0, &[3.0]).unwrap();
        assert_eq!((v.lo(), v.hi()), (0.0, 0.0));

        let coeff = Interval::new(1.0, 1.0).unwrap();
        let constraint = ConstraintSet::ball(vec![0.0], 10.0).unwrap();
        let q = quadratic_interval_problem(coeff, &[vec![2.0]], constraint).unwrap();
        let v = q.agent_value(0, &[5.0]).unwrap();
        assert!(v.is_degenerate());
        assert_abs_diff_eq!(v.lo(), 9.0);
    }

    #[test]
    fn parametric_single_box() {
        let spec = ParametricIntervalSpec {
            coefficient_boxes: vec![Interval::new(1.0, 2.0).unwrap()],
            family: Arc::new(|c: &[f64], x: &[f64]| c[0] * x[0] * x[0]),
            grid_points_per_coeff: 11,
            dim: 1,
        };
        let f = parametric_interval_fn(spec).unwrap();
        let v = f.eval(&[2.0]);
        assert_abs_diff_eq!(v.lo(), 4.0);
        assert_abs_diff_eq!(v.hi(), 8.0);
    }

    #[test]
    fn parametric_two_variable_family() {
        // c1*x1^2 + c2*x1*exp(c3*x2) over C1 = C2 = C3 = [0, 1] at (1, 0)
        let unit = Interval::new(0.0, 1.0).unwrap();
        let spec = ParametricIntervalSpec {
            coefficient_boxes: vec![unit, unit, unit],
            family: Arc::new(|c: &[f64], x: &[f64]| {
                c[0] * x[0] * x[0] + c[1] * x[0] * (c[2] * x[1]).exp()
            }),
            grid_points_per_coeff: 5,
            dim: 2,
        };
        let f = parametric_interval_fn(spec).unwrap();
        let v = f.eval(&[1.0, 0.0]);
        assert_abs_diff_eq!(v.lo(), 0.0);
        assert_abs_diff_eq!(v.hi(), 2.0);
    }

    #[test]
    fn parametric_constant_family_degenerates() {
        let spec = ParametricIntervalSpec {
            coefficient_boxes: vec![Interval::new(0.0, 1.0).unwrap()],
            family: Arc::new(|_c: &[f64], x: &[f64]| x[0] + 7.0),
            grid_points_per_coeff: 3,
            dim: 1,
        };
        let f = parametric_interval_fn(spec).unwrap();
        assert!(f.eval(&[1.5]).is_degenerate());
    }

    #[test]
    fn parametric_rejects_thin_grid() {
        let spec = ParametricIntervalSpec {
            coefficient_boxes: vec![Interval::new(0.0, 1.0).unwrap()],
            family: Arc::new(|c: &[f64], _x: &[f64]| c[0]),
            grid_points_per_coeff: 1,
            dim: 1,
        };
        assert!(parametric_interval_fn(spec).is_err());
    }

    #[test]
    fn designed_pareto_endpoints() {
        let p = designed_pareto_problem();
        let v = p.agent_value(0, &[1.0]).unwrap();
        assert_abs_diff_eq!(v.lo(), 0.0);
        assert_abs_diff_eq!(v.hi(), 9.0);
        let v = p.agent_value(0, &[3.0]).unwrap();
        assert_abs_diff_eq!(v.lo(), 4.0);
        assert_abs_diff_eq!(v.hi(), 5.0);
    }
}
