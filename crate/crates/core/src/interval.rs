//! Compact real intervals, their quasi-orderings, and weighted scalarization.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A non-empty compact interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Constructs `[lo, hi]`. Rejects `lo > hi` rather than swapping, so
    /// a reversed pair in a problem definition surfaces as an error.
    pub fn new(lo: f64, hi: f64) -> Result<Self, Error> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFiniteInterval { lo, hi });
        }
        if lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Self, Error> {
        Self::new(v, v)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Lower-endpoint ordering: `a.lo <= b.lo`.
    pub fn leq_l(&self, other: &Interval) -> bool {
        self.lo <= other.lo
    }

    /// Upper-endpoint ordering: `a.hi <= b.hi`.
    pub fn leq_u(&self, other: &Interval) -> bool {
        self.hi <= other.hi
    }

    /// Componentwise weak ordering: both endpoints compare.
    pub fn leq(&self, other: &Interval) -> bool {
        self.leq_l(other) && self.leq_u(other)
    }

    /// Mixed strict/weak dominance: weakly below in both endpoints and
    /// strictly below in at least one.
    pub fn strictly_dominates(&self, other: &Interval) -> bool {
        (self.lo < other.lo && self.hi <= other.hi)
            || (self.lo <= other.lo && self.hi < other.hi)
    }

    /// Weighted combination `w*lo + (1-w)*hi`; always lies inside the interval.
    pub fn scalarize(&self, weight: ScalarizationWeight) -> f64 {
        let w = weight.value();
        w * self.lo + (1.0 - w) * self.hi
    }
}

/// A scalarization weight in `[0, 1]`. Interior weights (strictly inside
/// `(0, 1)`) are the ones for which a scalarized minimizer is guaranteed
/// Pareto optimal, hence the separate flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationWeight(f64);

impl ScalarizationWeight {
    pub fn new(lambda: f64) -> Result<Self, Error> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidWeight(lambda));
        }
        Ok(Self(lambda))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }
}

/// An interval-valued function on `R^p`.
///
/// Implementations must be deterministic for a fixed point and return a valid
/// interval everywhere they are evaluated.
pub trait IntervalFn: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Interval;
}

/// Pareto check against a pool of attained values: `candidate` is Pareto
/// optimal iff every pool member weakly below it is also weakly above it.
pub fn is_pareto_optimal_in(candidate: &Interval, pool: &[Interval]) -> bool {
    pool.iter()
        .all(|v| !v.leq(candidate) || candidate.leq(v))
}
