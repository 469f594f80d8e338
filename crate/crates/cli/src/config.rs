//! Experiment config file: explicit keys, unknown keys rejected, everything
//! validated before any run starts.

use std::sync::Arc;

use serde::Deserialize;

use intervalopt::{
    designed_pareto_problem, fig2_schedule, metropolis_weights, quadratic_interval_problem,
    ConstraintSet, GraphSchedule, Interval, IntervalProblem, PerturbationDist, RunConfig,
    StepSchedule,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub schedule: ScheduleSpec,
    pub algorithm: AlgorithmSpec,
    pub run: RunSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "preset")]
pub enum ProblemSpec {
    /// The built-in 5-agent quadratic instance.
    #[serde(rename = "five_agent_quadratic")]
    FiveAgentQuadratic,
    /// The single-agent fixture with an analytic Pareto front.
    #[serde(rename = "designed_pareto")]
    DesignedPareto,
    /// A custom quadratic family with an interval coefficient.
    #[serde(rename = "quadratic")]
    Quadratic {
        coeff: [f64; 2],
        centers: Vec<Vec<f64>>,
        constraint: ConstraintSpec,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind")]
pub enum ConstraintSpec {
    #[serde(rename = "ball")]
    Ball { center: Vec<f64>, radius: f64 },
    #[serde(rename = "box")]
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// "fig2", "complete", or "ring"; mutually exclusive with `graphs`.
    pub preset: Option<String>,
    /// Explicit pattern: one list of 0-based undirected edges per round.
    pub graphs: Option<Vec<Vec<[usize; 2]>>>,
    pub kappa: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub iterations: usize,
    /// "rademacher" (default) or "symmetric_two_point" with `magnitude`.
    pub distribution: Option<String>,
    pub magnitude: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub seeds: Vec<u64>,
    pub lambda0: Vec<f64>,
    pub x0: Vec<Vec<f64>>,
    pub output_dir: Option<String>,
}

impl ConstraintSpec {
    fn build(&self) -> anyhow::Result<ConstraintSet> {
        Ok(match self {
            Self::Ball { center, radius } => ConstraintSet::ball(center.clone(), *radius)?,
            Self::Box { lower, upper } => {
                ConstraintSet::hyper_box(lower.clone(), upper.clone())?
            }
        })
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn build_problem(&self) -> anyhow::Result<Arc<IntervalProblem>> {
        Ok(Arc::new(match &self.problem {
            ProblemSpec::FiveAgentQuadratic => intervalopt::five_agent_quadratic(),
            ProblemSpec::DesignedPareto => designed_pareto_problem(),
            ProblemSpec::Quadratic {
                coeff,
                centers,
                constraint,
            } => quadratic_interval_problem(
                Interval::new(coeff[0], coeff[1])?,
                centers,
                constraint.build()?,
            )?,
        }))
    }

    pub fn build_schedule(&self, n: usize) -> anyhow::Result<Arc<GraphSchedule>> {
        let spec = &self.schedule;
        let schedule = match (&spec.preset, &spec.graphs) {
            (Some(name), None) => match name.as_str() {
                "fig2" => fig2_schedule(),
                "complete" => {
                    let mut edges = Vec::new();
                    for i in 0..n {
                        for j in (i + 1)..n {
                            edges.push((i, j));
                        }
                    }
                    GraphSchedule::new(vec![metropolis_weights(n, &edges)?], 1)?
                }
                "ring" => {
                    let edges: Vec<(usize, usize)> =
                        (0..n).map(|i| (i, (i + 1) % n)).collect();
                    GraphSchedule::new(vec![metropolis_weights(n, &edges)?], 1)?
                }
                other => anyhow::bail!("unknown schedule preset {other:?}"),
            },
            (None, Some(graphs)) => {
                let kappa = spec
                    .kappa
                    .ok_or_else(|| anyhow::anyhow!("explicit schedules need kappa"))?;
                let pattern = graphs
                    .iter()
                    .map(|edges| {
                        let pairs: Vec<(usize, usize)> =
                            edges.iter().map(|e| (e[0], e[1])).collect();
                        metropolis_weights(n, &pairs)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GraphSchedule::new(pattern, kappa)?
            }
            _ => anyhow::bail!("schedule needs exactly one of `preset` or `graphs`"),
        };
        if schedule.n() != n {
            anyhow::bail!(
                "schedule has {} agents but the problem has {n}",
                schedule.n()
            );
        }
        Ok(Arc::new(schedule))
    }

    pub fn build_distribution(&self) -> anyhow::Result<PerturbationDist> {
        match self.algorithm.distribution.as_deref() {
            None | Some("rademacher") => {
                if self.algorithm.magnitude.is_some() {
                    anyhow::bail!("magnitude is only valid for symmetric_two_point");
                }
                Ok(PerturbationDist::Rademacher)
            }
            Some("symmetric_two_point") => {
                let m = self
                    .algorithm
                    .magnitude
                    .ok_or_else(|| anyhow::anyhow!("symmetric_two_point needs magnitude"))?;
                Ok(PerturbationDist::symmetric_two_point(m)?)
            }
            Some(other) => anyhow::bail!("unknown distribution {other:?}"),
        }
    }

    /// Validates everything and produces one RunConfig per seed.
    pub fn build_runs(&self, seed_override: Option<&[u64]>) -> anyhow::Result<Vec<RunConfig>> {
        let problem = self.build_problem()?;
        let schedule = self.build_schedule(problem.n_agents())?;
        let steps = StepSchedule::new(self.algorithm.epsilon, self.algorithm.delta)?;
        let dist = self.build_distribution()?;
        let seeds = seed_override.unwrap_or(&self.run.seeds);
        if seeds.is_empty() {
            anyhow::bail!("at least one seed is required");
        }
        Ok(seeds
            .iter()
            .map(|&seed| RunConfig {
                problem: Arc::clone(&problem),
                schedule: Arc::clone(&schedule),
                steps,
                dist,
                iterations: self.algorithm.iterations,
                lambda0: self.run.lambda0.clone(),
                x0: self.run.x0.clone(),
                seed,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const FIVE_AGENT_TOML: &str = r#"
[problem]
preset = "five_agent_quadratic"

[schedule]
preset = "fig2"

[algorithm]
epsilon = 0.125
delta = 0.25
iterations = 500

[run]
seeds = [1, 2]
lambda0 = [0.1, 0.3, 0.5, 0.7, 0.9]
x0 = [[0.0], [0.0], [0.0], [0.0], [0.0]]
"#;

    #[test]
    fn parses_and_builds_the_paper_config() {
        let cfg = ExperimentConfig::parse(FIVE_AGENT_TOML).unwrap();
        let runs = cfg.build_runs(None).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].problem.n_agents(), 5);
        assert_eq!(runs[0].schedule.kappa(), 4);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = FIVE_AGENT_TOML.replace("seeds", "sseeds");
        assert!(ExperimentConfig::parse(&bad).is_err());
        let bad = format!("{FIVE_AGENT_TOML}\n[extra]\nx = 1\n");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn rejects_bad_step_parameters_by_name() {
        let bad = FIVE_AGENT_TOML.replace("delta = 0.25", "delta = 0.6");
        let cfg = ExperimentConfig::parse(&bad).unwrap();
        let err = cfg.build_runs(None).map(|_| ()).unwrap_err().to_string();
        assert!(err.contains("delta < 1/2 - epsilon"), "{err}");
    }

    #[test]
    fn explicit_schedule_round_trip() {
        let toml = r#"
[problem]
preset = "quadratic"
coeff = [1.0, 2.0]
centers = [[0.0], [1.0], [2.0]]
constraint = { kind = "box", lower = [-5.0], upper = [5.0] }

[schedule]
graphs = [[[0, 1]], [[1, 2]]]
kappa = 2

[algorithm]
epsilon = 0.0
delta = 0.3
iterations = 10

[run]
seeds = [7]
lambda0 = [0.2, 0.5, 0.8]
x0 = [[0.0], [0.0], [0.0]]
"#;
        let cfg = ExperimentConfig::parse(toml).unwrap();
        let runs = cfg.build_runs(None).unwrap();
        assert_eq!(runs[0].schedule.pattern().len(), 2);
    }

    #[test]
    fn ring_and_complete_presets() {
        for preset in ["ring", "complete"] {
            let toml = FIVE_AGENT_TOML.replace("fig2", preset);
            let cfg = ExperimentConfig::parse(&toml).unwrap();
            assert!(cfg.build_runs(None).is_ok(), "preset {preset}");
        }
    }
}
