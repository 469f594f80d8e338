//! Batch runner for distributed interval optimization experiments.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 divergence, 1 anything else.

mod config;
mod output;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use intervalopt::{pareto_sweep, run, Error as CoreError};

const OUT_ENV: &str = "INTERVALOPT_OUT";

#[derive(Parser)]
#[command(name = "intervalopt", version, about = "Distributed interval optimization runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the algorithm for each configured seed and write trajectories plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config and the INTERVALOPT_OUT env var).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated seed list overriding the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Sweep the scalarization weight and report the resulting front.
    Pareto {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated interior weights; default is 0.1 through 0.9.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Run the built-in self-check suites with fixed seeds.
    Verify {
        /// Run only the named suite (projection, mixing, perturbation, estimator).
        #[arg(long)]
        suite: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { config, out, seeds } => cmd_run(&config, out, seeds.as_deref()),
        Cmd::Pareto { config, out, grid } => cmd_pareto(&config, out, grid),
        Cmd::Verify { suite } => return cmd_verify(suite.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Invalid inputs and failed runs get distinct exit codes so batch drivers can
/// tell a bad config from a blown-up trajectory.
fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Diverged { .. }) => 3,
        Some(_) => 2,
        None if err.is::<toml::de::Error>() => 2,
        None if err.is::<std::io::Error>() => 1,
        None => 2,
    }
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    ExperimentConfig::parse(&text)
}

fn resolve_out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.run.output_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    seeds: Option<&[u64]>,
) -> anyhow::Result<()> {
    let cfg = load_config(config_path)?;
    let out_dir = resolve_out_dir(out, &cfg);
    let runs = cfg.build_runs(seeds)?;
    fs::create_dir_all(&out_dir)?;
    let mut records = Vec::with_capacity(runs.len());
    for rc in &runs {
        let record = run(rc)?;
        let path = out_dir.join(format!("trajectory_{}.csv", rc.seed));
        output::write_trajectory_csv(&path, &record)?;
        println!(
            "seed {}: T = {}, consensus error = {:.3e}, wrote {}",
            rc.seed,
            record.iterations(),
            record.metrics[record.iterations()].consensus_error,
            path.display()
        );
        records.push(record);
    }
    let summary = output::summarize(&records);
    let path = out_dir.join("summary.json");
    output::write_summary_json(&path, &summary)?;
    let xs: Vec<String> = summary
        .seed_mean_final_x
        .iter()
        .map(|v| format!("{v:.4}"))
        .collect();
    println!(
        "summary: seed-mean final x = [{}], mean consensus error = {:.3e}, wrote {}",
        xs.join(", "),
        summary.mean_consensus_error,
        path.display()
    );
    Ok(())
}

fn cmd_pareto(
    config_path: &Path,
    out: Option<PathBuf>,
    grid: Option<Vec<f64>>,
) -> anyhow::Result<()> {
    let cfg = load_config(config_path)?;
    let out_dir = resolve_out_dir(out, &cfg);
    let problem = cfg.build_problem()?;
    let grid = grid.unwrap_or_else(|| (1..10).map(|i| i as f64 / 10.0).collect());
    let front = pareto_sweep(&problem, &grid)?;
    fs::create_dir_all(&out_dir)?;
    let path = out_dir.join("pareto.csv");
    output::write_pareto_csv(&path, &front)?;
    for pt in &front {
        let coords: Vec<String> = pt.x_star.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "lambda = {:.3}: x* = [{}], value = [{:.4}, {:.4}], pareto = {}",
            pt.lambda,
            coords.join(", "),
            pt.total.lo(),
            pt.total.hi(),
            pt.pareto
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(suite: Option<&str>) -> ExitCode {
    let selected: Vec<&str> = match suite {
        Some(name) => {
            if !verify::SUITES.contains(&name) {
                eprintln!(
                    "error: unknown suite {name:?}; available: {}",
                    verify::SUITES.join(", ")
                );
                return ExitCode::from(2);
            }
            vec![name]
        }
        None => verify::SUITES.to_vec(),
    };
    let mut failed = false;
    for name in selected {
        match verify::run_suite(name) {
            Ok(detail) => println!("verify {name}: PASS ({detail})"),
            Err(detail) => {
                failed = true;
                println!("verify {name}: FAIL ({detail})");
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
