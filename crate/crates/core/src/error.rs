use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lo={lo} > hi={hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("interval bounds must be finite (lo={lo}, hi={hi})")]
    NonFiniteInterval { lo: f64, hi: f64 },
    #[error("scalarization weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("agent index {index} out of range for {agents} agents")]
    AgentOutOfRange { index: usize, agents: usize },
    #[error("invalid constraint set: {0}")]
    InvalidConstraint(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("edge set is not symmetric: ({0}, {1}) has no reverse edge")]
    AsymmetricEdges(usize, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("transition product needs k >= s (k={k}, s={s})")]
    BadProductRange { k: usize, s: usize },
    #[error("step-size parameters rejected: {0}")]
    InvalidStepParams(String),
    #[error("oracle returned a non-finite value at a queried point")]
    NonFiniteOracle,
    #[error("invalid run configuration: {0}")]
    InvalidRunConfig(String),
    #[error("iterate diverged at iteration {iteration} (|x| = {norm:.3e})")]
    Diverged { iteration: usize, norm: f64 },
    #[error("rate fit needs at least {needed} positive points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
}
