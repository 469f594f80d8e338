//! Distributed interval optimization over time-varying networks.
//!
//! Agents hold interval-valued objectives `G_i(x) = [L_i(x), R_i(x)]` and a
//! shared convex constraint set. Each agent scalarizes its objective with a
//! local weight, estimates descent directions from two function evaluations
//! at randomly perturbed points, and averages both its iterate and its weight
//! with neighbors over a time-varying doubly stochastic network. The library
//! provides the interval orderings, problem builders, network schedules, the
//! zeroth-order estimator, the iteration engine, and a centralized reference
//! solver used for regret and Pareto-front checks.

pub mod engine;
pub mod error;
pub mod interval;
pub mod network;
pub mod problems;
pub mod zeroth_order;

pub use engine::{
    pareto_sweep, rate_fit, reference_solve, run, ParetoPoint, RateFit, ReferenceSolution,
    RunConfig, RunRecord,
};
pub use error::Error;
pub use interval::{is_pareto_optimal_in, Interval, IntervalFn, ScalarizationWeight};
pub use network::{
    fig2_schedule, joint_connectivity_check, metropolis_weights, mixing_rate_estimate,
    transition_product, GraphSchedule, MixingEstimate, TransitionProduct, WeightedDigraph,
};
pub use problems::{
    designed_pareto_problem, five_agent_quadratic, parametric_interval_fn,
    quadratic_interval_problem, ConstraintSet, IntervalProblem, ParametricIntervalSpec,
};
pub use zeroth_order::{
    agent_stream, randomized_difference, schedule_diagnostics, GradientEstimate, PerturbationDist,
    ScheduleDiagnostics, StepSchedule,
};
