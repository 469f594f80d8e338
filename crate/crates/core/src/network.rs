//! Time-varying communication graphs with doubly stochastic weights,
//! transition-matrix products, and mixing-rate estimation.

use std::collections::BTreeSet;

use crate::error::Error;

const STOCHASTIC_TOL: f64 = 1e-12;
const PRODUCT_TOL: f64 = 1e-10;
const EXACT_MIXING_TOL: f64 = 1e-14;

/// One communication round: an edge set `(j, i)` and a doubly stochastic
/// weight matrix whose support matches the edges plus the diagonal.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    weights: Vec<Vec<f64>>,
}

impl WeightedDigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Smallest positive entry of the weight matrix.
    pub fn eta(&self) -> f64 {
        self.weights
            .iter()
            .flatten()
            .copied()
            .filter(|&w| w > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Applies the matrix to a stacked state: `out[i] = sum_j w_ij * x[j]`.
    pub fn mix(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let p = x[0].len();
        (0..self.n)
            .map(|i| {
                let mut acc = vec![0.0; p];
                for j in 0..self.n {
                    let w = self.weights[i][j];
                    if w != 0.0 {
                        for (a, v) in acc.iter_mut().zip(&x[j]) {
                            *a += w * v;
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mix_scalars(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.weights[i][j] * x[j]).sum())
            .collect()
    }

    fn validate(&self) -> Result<(), Error> {
        for i in 0..self.n {
            let row: f64 = self.weights[i].iter().sum();
            let col: f64 = (0..self.n).map(|j| self.weights[j][i]).sum();
            if (row - 1.0).abs() > STOCHASTIC_TOL || (col - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidGraph(format!(
                    "row/column {i} sums are {row}/{col}, not 1"
                )));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.weights[i][j];
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidGraph(format!(
                        "weight [{i}][{j}] = {w} outside [0, 1]"
                    )));
                }
                if i != j && w > 0.0 && !self.edges.contains(&(j, i)) {
                    return Err(Error::InvalidGraph(format!(
                        "weight [{i}][{j}] positive without edge ({j}, {i})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Metropolis weights for an undirected edge set:
/// `w_ij = 1 / (1 + max(deg(i), deg(j)))` on edges, diagonal absorbs the
/// remainder. Doubly stochastic by construction.
pub fn metropolis_weights(
    n: usize,
    edges: &[(usize, usize)],
) -> Result<WeightedDigraph, Error> {
    if n == 0 {
        return Err(Error::InvalidGraph("n must be at least 1".into()));
    }
    let mut set = BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n || a == b {
            return Err(Error::InvalidGraph(format!(
                "edge ({a}, {b}) invalid for n = {n}"
            )));
        }
        set.insert((a, b));
        set.insert((b, a));
    }
    for &(a, b) in edges {
        if !set.contains(&(b, a)) {
            return Err(Error::AsymmetricEdges(a, b));
        }
    }
    let mut deg = vec![0usize; n];
    for &(a, b) in &set {
        if a < b {
            deg[a] += 1;
            deg[b] += 1;
        }
    }
    let mut w = vec![vec![0.0; n]; n];
    for &(j, i) in &set {
        w[i][j] = 1.0 / (1.0 + deg[i].max(deg[j]) as f64);
    }
    for i in 0..n {
        let off: f64 = w[i].iter().sum();
        w[i][i] = 1.0 - off;
    }
    let g = WeightedDigraph {
        n,
        edges: set,
        weights: w,
    };
    g.validate()?;
    Ok(g)
}

/// A periodic schedule of communication rounds. `kappa` is the window length
/// over which the union graph must be connected.
#[derive(Debug, Clone)]
pub struct GraphSchedule {
    pattern: Vec<WeightedDigraph>,
    kappa: usize,
    eta: f64,
}

impl GraphSchedule {
    pub fn new(pattern: Vec<WeightedDigraph>, kappa: usize) -> Result<Self, Error> {
        if pattern.is_empty() {
            return Err(Error::InvalidSchedule("empty pattern".into()));
        }
        let n = pattern[0].n();
        if pattern.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidSchedule(
                "all graphs must share the agent count".into(),
            ));
        }
        if kappa == 0 {
            return Err(Error::InvalidSchedule("kappa must be at least 1".into()));
        }
        let eta = pattern.iter().map(WeightedDigraph::eta).fold(1.0, f64::min);
        let schedule = Self {
            pattern,
            kappa,
            eta,
        };
        if !joint_connectivity_check(&schedule, kappa, false) {
            return Err(Error::InvalidSchedule(format!(
                "kappa = {kappa} fails the joint-connectivity check"
            )));
        }
        Ok(schedule)
    }

    pub fn n(&self) -> usize {
        self.pattern[0].n()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn pattern(&self) -> &[WeightedDigraph] {
        &self.pattern
    }

    pub fn graph_at(&self, k: usize) -> &WeightedDigraph {
        &self.pattern[k % self.pattern.len()]
    }
}

fn union_connected(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    // BFS over the undirected union
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            if a == v && !seen[b] {
                seen[b] = true;
                stack.push(b);
            } else if b == v && !seen[a] {
                seen[a] = true;
                stack.push(a);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Joint connectivity over every window of `kappa` consecutive rounds of the
/// cyclic pattern.
///
/// The default reading requires a connected union; `strict = true` requires
/// every ordered pair to appear in every window, which is far stronger and
/// rarely satisfied by sparse schedules.
pub fn joint_connectivity_check(schedule: &GraphSchedule, kappa: usize, strict: bool) -> bool {
    if kappa == 0 {
        return false;
    }
    let n = schedule.n();
    let len = schedule.pattern().len();
    for start in 0..len {
        let mut union: BTreeSet<(usize, usize)> = BTreeSet::new();
        for off in 0..kappa {
            union.extend(schedule.pattern()[(start + off) % len].edges().iter().copied());
        }
        if strict {
            for i in 0..n {
                for j in 0..n {
                    if i != j && !union.contains(&(j, i)) {
                        return false;
                    }
                }
            }
        } else if n > 1 && !union_connected(n, &union) {
            return false;
        }
    }
    true
}

/// The 5-agent periodic schedule of four undirected rounds (1-based nodes):
/// (a) outer cycle plus chords 1-3 and 2-4, (b) triangle 1-2-3,
/// (c) triangle 2-3-4, (d) path edges 4-5 and 5-1. Metropolis weights,
/// window length 4.
pub fn fig2_schedule() -> GraphSchedule {
    let graphs = [
        vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3)],
        vec![(0, 1), (1, 2), (0, 2)],
        vec![(1, 2), (2, 3), (1, 3)],
        vec![(3, 4), (4, 0)],
    ];
    let pattern = graphs
        .iter()
        .map(|e| metropolis_weights(5, e).expect("symmetric edge lists"))
        .collect();
    GraphSchedule::new(pattern, 4).expect("window of 4 rounds is jointly connected")
}

/// The product `W(k) W(k-1) ... W(s)`.
#[derive(Debug, Clone)]
pub struct TransitionProduct {
    psi: Vec<Vec<f64>>,
    k: usize,
    s: usize,
}

impl TransitionProduct {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.psi[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.psi
    }

    pub fn range(&self) -> (usize, usize) {
        (self.k, self.s)
    }

    /// Largest deviation of any entry from the uniform value `1/n`.
    pub fn max_deviation(&self) -> f64 {
        let n = self.psi.len() as f64;
        self.psi
            .iter()
            .flatten()
            .map(|&v| (v - 1.0 / n).abs())
            .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<(), Error> {
        let n = self.psi.len();
        for i in 0..n {
            let row: f64 = self.psi[i].iter().sum();
            let col: f64 = (0..n).map(|j| self.psi[j][i]).sum();
            if (row - 1.0).abs() > PRODUCT_TOL || (col - 1.0).abs() > PRODUCT_TOL {
                return Err(Error::InvalidGraph(format!(
                    "transition product lost double stochasticity at index {i}"
                )));
            }
        }
        Ok(())
    }
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for l in 0..n {
            let v = a[i][l];
            if v != 0.0 {
                for j in 0..n {
                    out[i][j] += v * b[l][j];
                }
            }
        }
    }
    out
}

pub fn transition_product(
    schedule: &GraphSchedule,
    k: usize,
    s: usize,
) -> Result<TransitionProduct, Error> {
    if k < s {
        return Err(Error::BadProductRange { k, s });
    }
    let mut psi = schedule.graph_at(s).weights().to_vec();
    for t in (s + 1)..=k {
        psi = mat_mul(schedule.graph_at(t).weights(), &psi);
    }
    let product = TransitionProduct { psi, k, s };
    product.validate()?;
    Ok(product)
}

/// Outcome of fitting a geometric envelope to the mixing error
/// `max_ij |Psi(k,0)_ij - 1/n|`.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingEstimate {
    /// All deviations are at numerical zero; nothing to fit.
    Exact,
    /// `mu_hat * beta_hat^k` least-squares fit; mixing requires `beta_hat < 1`.
    Geometric { mu_hat: f64, beta_hat: f64 },
}

/// Deviations from uniform for `Psi(k, 0)`, `k = 0..=horizon`.
pub fn mixing_errors(schedule: &GraphSchedule, horizon: usize) -> Result<Vec<f64>, Error> {
    let n = schedule.n();
    let uniform = 1.0 / n as f64;
    let mut psi = schedule.graph_at(0).weights().to_vec();
    let mut errs = Vec::with_capacity(horizon + 1);
    let deviation = |m: &[Vec<f64>]| {
        m.iter()
            .flatten()
            .map(|&v| (v - uniform).abs())
            .fold(0.0, f64::max)
    };
    errs.push(deviation(&psi));
    for k in 1..=horizon {
        psi = mat_mul(schedule.graph_at(k).weights(), &psi);
        errs.push(deviation(&psi));
    }
    Ok(errs)
}

/// Fits `log err(k) ~ log mu + k log beta` over the horizon, skipping points
/// already at the numerical floor.
pub fn mixing_rate_estimate(
    schedule: &GraphSchedule,
    horizon: usize,
) -> Result<MixingEstimate, Error> {
    if horizon < 10 {
        return Err(Error::InvalidSchedule(
            "mixing horizon must be at least 10".into(),
        ));
    }
    let errs = mixing_errors(schedule, horizon)?;
    let points: Vec<(f64, f64)> = errs
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > EXACT_MIXING_TOL)
        .map(|(k, &e)| (k as f64, e.ln()))
        .collect();
    if points.len() < 2 {
        return Ok(MixingEstimate::Exact);
    }
    let (_, slope) = least_squares(&points);
    // lift the intercept so mu * beta^k covers every sample, not just the
    // least-squares mean line; periodic schedules scallop around the fit
    let intercept = points
        .iter()
        .map(|&(k, log_e)| log_e - slope * k)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MixingEstimate::Geometric {
        mu_hat: intercept.exp(),
        beta_hat: slope.exp(),
    })
}

/// Ordinary least squares `y = a + b x`; returns `(a, b)`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < f64::EPSILON {
        return (sy / n, 0.0);
    }
    let b = (n * sxy - sx * sy) / denom;
    let a = (sy - b * sx) / n;
    (a, b)
}
