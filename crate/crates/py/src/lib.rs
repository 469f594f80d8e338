//! Python bindings: interval values and orderings, constraint projection,
//! the distributed run, and the scalarization sweep.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use intervalopt as core;
use intervalopt::{
    fig2_schedule, five_agent_quadratic, is_pareto_optimal_in, pareto_sweep, run,
    PerturbationDist, RunConfig, ScalarizationWeight, StepSchedule,
};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Interval {
    inner: core::Interval,
}

#[pymethods]
impl Interval {
    #[new]
    fn new(lo: f64, hi: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::Interval::new(lo, hi).map_err(err)?,
        })
    }

    #[staticmethod]
    fn point(v: f64) -> PyResult<Self> {
        Self::new(v, v)
    }

    #[getter]
    fn lo(&self) -> f64 {
        self.inner.lo()
    }

    #[getter]
    fn hi(&self) -> f64 {
        self.inner.hi()
    }

    fn leq_l(&self, other: &Interval) -> bool {
        self.inner.leq_l(&other.inner)
    }

    fn leq_u(&self, other: &Interval) -> bool {
        self.inner.leq_u(&other.inner)
    }

    fn leq(&self, other: &Interval) -> bool {
        self.inner.leq(&other.inner)
    }

    fn strictly_dominates(&self, other: &Interval) -> bool {
        self.inner.strictly_dominates(&other.inner)
    }

    fn scalarize(&self, weight: f64) -> PyResult<f64> {
        let w = ScalarizationWeight::new(weight).map_err(err)?;
        Ok(self.inner.scalarize(w))
    }

    fn __repr__(&self) -> String {
        format!("Interval({}, {})", self.inner.lo(), self.inner.hi())
    }
}

#[pyclass(frozen)]
struct Constraint {
    inner: core::ConstraintSet,
}

#[pymethods]
impl Constraint {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::ConstraintSet::ball(center, radius).map_err(err)?,
        })
    }

    #[staticmethod]
    fn box_(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::ConstraintSet::hyper_box(lower, upper).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.project(&x).map_err(err)
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.distance(&x).map_err(err)
    }
}

#[pyclass(frozen, get_all)]
struct RunSummary {
    seed: u64,
    iterations: usize,
    final_x: Vec<Vec<f64>>,
    final_lambda: Vec<f64>,
    mean_final_x: Vec<f64>,
    consensus_error: f64,
    regret: f64,
    lambda_star: f64,
    x_star: Vec<f64>,
    f_star: f64,
}

/// Runs the built-in 5-agent quadratic experiment over the switching schedule.
#[pyfunction]
#[pyo3(signature = (seed, iterations=500, epsilon=0.125, delta=0.25))]
fn run_five_agent(seed: u64, iterations: usize, epsilon: f64, delta: f64) -> PyResult<RunSummary> {
    let config = RunConfig {
        problem: Arc::new(five_agent_quadratic()),
        schedule: Arc::new(fig2_schedule()),
        steps: StepSchedule::new(epsilon, delta).map_err(err)?,
        dist: PerturbationDist::Rademacher,
        iterations,
        lambda0: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        x0: vec![vec![0.0]; 5],
        seed,
    };
    let record = run(&config).map_err(err)?;
    let finals = record.final_states();
    let m = &record.metrics[record.iterations()];
    Ok(RunSummary {
        seed,
        iterations: record.iterations(),
        final_x: finals.iter().map(|a| a.x.clone()).collect(),
        final_lambda: finals.iter().map(|a| a.lambda).collect(),
        mean_final_x: record.mean_x(record.iterations()),
        consensus_error: m.consensus_error,
        regret: m.regret_running,
        lambda_star: record.reference.lambda_star,
        x_star: record.reference.x_star.clone(),
        f_star: record.reference.f_star,
    })
}

#[pyclass(frozen, get_all)]
struct ParetoEntry {
    weight: f64,
    x_star: Vec<f64>,
    lo: f64,
    hi: f64,
    pareto: bool,
}

/// Sweeps interior scalarization weights on the single-agent fixture whose
/// front is x*(lambda) = 3 - 2*lambda.
#[pyfunction]
fn pareto_front_designed(grid: Vec<f64>) -> PyResult<Vec<ParetoEntry>> {
    let problem = core::designed_pareto_problem();
    let front = pareto_sweep(&problem, &grid).map_err(err)?;
    Ok(front
        .into_iter()
        .map(|pt| ParetoEntry {
            weight: pt.lambda,
            x_star: pt.x_star,
            lo: pt.total.lo(),
            hi: pt.total.hi(),
            pareto: pt.pareto,
        })
        .collect())
}

/// True when no interval in the pool improves on the candidate without the
/// candidate improving back.
#[pyfunction]
fn is_pareto_optimal(candidate: &Interval, pool: Vec<Interval>) -> bool {
    let values: Vec<core::Interval> = pool.into_iter().map(|v| v.inner).collect();
    is_pareto_optimal_in(&candidate.inner, &values)
}

#[pymodule]
fn intervalopt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Interval>()?;
    m.add_class::<Constraint>()?;
    m.add_class::<RunSummary>()?;
    m.add_class::<ParetoEntry>()?;
    m.add_function(wrap_pyfunction!(run_five_agent, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_front_designed, m)?)?;
    m.add_function(wrap_pyfunction!(is_pareto_optimal, m)?)?;
    Ok(())
}
