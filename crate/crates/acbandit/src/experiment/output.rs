//! CSV and JSON experiment outputs.
//!
//! `trials.csv` and `aggregate.csv` are deterministic byte-for-byte for a
//! fixed configuration and seed; `summary.json` carries wall time and is not.

use super::config::ExperimentConfig;
use super::runner::{run_experiment, ExperimentResult, TrialTrace};
use super::{AggregateCurve, ExperimentError};
use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_owned(),
        source,
    }
}

/// One row per trial and step: `trial,t,regret,cum_regret,pi_t`.
pub fn write_trials_csv<W: Write>(mut out: W, trials: &[TrialTrace]) -> std::io::Result<()> {
    writeln!(out, "trial,t,regret,cum_regret,pi_t")?;
    for trace in trials {
        for t in 0..trace.regret.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                trace.trial,
                t + 1,
                trace.regret.per_step[t],
                trace.regret.cumulative[t],
                trace.pis[t]
            )?;
        }
    }
    Ok(())
}

/// One row per step: `t,median,q1,q3` of cumulative regret.
pub fn write_aggregate_csv<W: Write>(mut out: W, curve: &AggregateCurve) -> std::io::Result<()> {
    writeln!(out, "t,median,q1,q3")?;
    for t in 0..curve.len() {
        writeln!(
            out,
            "{},{},{},{}",
            t + 1,
            curve.median[t],
            curve.q1[t],
            curve.q3[t]
        )?;
    }
    Ok(())
}

/// Width-diagnostic rollup across trials.
#[derive(Debug, Clone, Serialize)]
pub struct WidthSummary {
    pub all_satisfied: bool,
    pub worst_lhs: f64,
    pub bound: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub final_median_cum_regret: f64,
    pub final_q1_cum_regret: f64,
    pub final_q3_cum_regret: f64,
    pub width_diagnostic: Option<WidthSummary>,
    pub wall_time_secs: f64,
}

fn build_summary(
    config: &ExperimentConfig,
    result: &ExperimentResult,
    wall_time_secs: f64,
) -> Summary {
    let last = result.aggregate.len().saturating_sub(1);
    let width_diagnostic = if result.width_checks.is_empty() {
        None
    } else {
        Some(WidthSummary {
            all_satisfied: result.width_checks.iter().all(|w| w.satisfied),
            worst_lhs: result
                .width_checks
                .iter()
                .map(|w| w.lhs)
                .fold(f64::NEG_INFINITY, f64::max),
            bound: result.width_checks[0].rhs,
        })
    };
    Summary {
        config: config.clone(),
        final_median_cum_regret: result.aggregate.median[last],
        final_q1_cum_regret: result.aggregate.q1[last],
        final_q3_cum_regret: result.aggregate.q3[last],
        width_diagnostic,
        wall_time_secs,
    }
}

/// Run the experiment and write `trials.csv`, `aggregate.csv`, and
/// `summary.json` into `dir` (created if missing).
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<Summary, ExperimentError> {
    let started = Instant::now();
    let result = run_experiment(config)?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let trials_path: PathBuf = dir.join("trials.csv");
    let mut out = BufWriter::new(File::create(&trials_path).map_err(io_err(&trials_path))?);
    write_trials_csv(&mut out, &result.trials).map_err(io_err(&trials_path))?;
    out.flush().map_err(io_err(&trials_path))?;

    let aggregate_path = dir.join("aggregate.csv");
    let mut out = BufWriter::new(File::create(&aggregate_path).map_err(io_err(&aggregate_path))?);
    write_aggregate_csv(&mut out, &result.aggregate).map_err(io_err(&aggregate_path))?;
    out.flush().map_err(io_err(&aggregate_path))?;

    let summary = build_summary(config, &result, started.elapsed().as_secs_f64());
    let summary_path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|source| ExperimentError::Json {
        path: summary_path.clone(),
        source,
    })?;
    fs::write(&summary_path, text + "\n").map_err(io_err(&summary_path))?;
    Ok(summary)
}
