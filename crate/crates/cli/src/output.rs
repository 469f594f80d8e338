//! File outputs: per-seed trajectory CSVs and a run summary JSON.
//! Floats in the CSVs use 17 significant digits so re-parsing is exact.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use intervalopt::{rate_fit, ParetoPoint, ReferenceSolution, RunRecord};

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv(path: &Path, record: &RunRecord) -> anyhow::Result<()> {
    let dim = record.trajectory[0][0].x.len();
    let mut out = Vec::new();
    let xs: Vec<String> = (0..dim).map(|q| format!("x_{q}")).collect();
    writeln!(
        out,
        "iter,agent,{},lambda,consensus_err,regret_running",
        xs.join(",")
    )?;
    for (k, states) in record.trajectory.iter().enumerate() {
        let m = &record.metrics[k];
        for (i, a) in states.iter().enumerate() {
            let coords: Vec<String> = a.x.iter().map(|&v| fmt(v)).collect();
            writeln!(
                out,
                "{k},{i},{},{},{},{}",
                coords.join(","),
                fmt(a.lambda),
                fmt(m.consensus_error),
                fmt(m.regret_running)
            )?;
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_x: Vec<Vec<f64>>,
    pub final_lambda: Vec<f64>,
    pub mean_final_x: Vec<f64>,
    pub consensus_error: f64,
    pub regret: f64,
}

#[derive(Serialize)]
pub struct RateReport {
    pub slope: Option<f64>,
    pub excluded: Option<usize>,
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct Summary {
    pub iterations: usize,
    pub reference: ReferenceSolution,
    pub seeds: Vec<SeedSummary>,
    pub seed_mean_final_x: Vec<f64>,
    pub mean_consensus_error: f64,
    pub mean_regret: f64,
    pub regret_rate: RateReport,
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let t = records[0].iterations();
    let dim = records[0].trajectory[0][0].x.len();
    let mut seeds = Vec::new();
    let mut seed_mean_final_x = vec![0.0; dim];
    let mut mean_consensus_error = 0.0;
    let mut mean_regret = 0.0;
    let mut mean_curve = vec![0.0f64; t + 1];
    for r in records {
        let finals = r.final_states();
        let mean_final_x = r.mean_x(t);
        for (acc, &v) in seed_mean_final_x.iter_mut().zip(&mean_final_x) {
            *acc += v;
        }
        let m = &r.metrics[t];
        mean_consensus_error += m.consensus_error;
        mean_regret += m.regret_running;
        for (acc, metric) in mean_curve.iter_mut().zip(&r.metrics) {
            *acc += metric.regret_running;
        }
        seeds.push(SeedSummary {
            seed: r.seed,
            final_x: finals.iter().map(|a| a.x.clone()).collect(),
            final_lambda: finals.iter().map(|a| a.lambda).collect(),
            mean_final_x,
            consensus_error: m.consensus_error,
            regret: m.regret_running,
        });
    }
    let n = records.len() as f64;
    for v in &mut seed_mean_final_x {
        *v /= n;
    }
    mean_consensus_error /= n;
    mean_regret /= n;
    let curve: Vec<(f64, f64)> = mean_curve
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &r)| (k as f64, r / n))
        .collect();
    let regret_rate = match rate_fit(&curve) {
        Ok(f) => RateReport {
            slope: Some(f.slope),
            excluded: Some(f.excluded),
            note: None,
        },
        Err(e) => RateReport {
            slope: None,
            excluded: None,
            note: Some(e.to_string()),
        },
    };
    Summary {
        iterations: t,
        reference: records[0].reference.clone(),
        seeds,
        seed_mean_final_x,
        mean_consensus_error,
        mean_regret,
        regret_rate,
    }
}

pub fn write_summary_json(path: &Path, summary: &Summary) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_pareto_csv(path: &Path, front: &[ParetoPoint]) -> anyhow::Result<()> {
    let dim = front[0].x_star.len();
    let mut out = Vec::new();
    let xs: Vec<String> = (0..dim).map(|q| format!("x_{q}")).collect();
    writeln!(out, "lambda,{},total_lo,total_hi,pareto", xs.join(","))?;
    for pt in front {
        let coords: Vec<String> = pt.x_star.iter().map(|&v| fmt(v)).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt(pt.lambda),
            coords.join(","),
            fmt(pt.total.lo()),
            fmt(pt.total.hi()),
            pt.pareto
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::fmt;

    #[test]
    fn formatted_floats_round_trip_exactly() {
        for v in [1.0 / 3.0, -2.5e-17, 12.5, f64::MIN_POSITIVE, 0.1 + 0.2] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
    }
}
