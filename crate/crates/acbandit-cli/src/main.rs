//! Command-line front end for the action-centered bandit experiments.

use acbandit::experiment::{
    run_to_dir, sum_width_diagnostic, trial_rng, Algorithm, ExperimentConfig,
};
use acbandit::policy::{ActionCenteredBandit, BanditPolicy, BenchmarkBandit};
use acbandit::replay::{generate_log, read_log_file, replay, write_log_file};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "acbandit", version, about = "Action-centered contextual bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded multi-trial simulation and write trials.csv,
    /// aggregate.csv, and summary.json.
    Simulate {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's output_path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the configured policy offline against a logged dataset.
    Replay {
        /// CSV log of decision points.
        #[arg(long)]
        log: PathBuf,
        /// JSON experiment configuration (algorithm, bounds, v, seed).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic log under a constant-probability logging policy.
    GenLog {
        /// JSON experiment configuration (environment and seed).
        #[arg(long)]
        config: PathBuf,
        /// Probability of a nonzero action at each point.
        #[arg(long)]
        pi: f64,
        /// Number of decision points.
        #[arg(long)]
        horizon: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the width-sum bound on a trace of (pi, z) pairs.
    Diagnostics {
        /// CSV trace with header `pi,z`, one row per step.
        #[arg(long)]
        trace: PathBuf,
        /// Posterior dimension the bound is evaluated at.
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
}

fn main() {
    if let Err(error) = run() {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate { config, out } => simulate(&config, out.as_deref()),
        Command::Replay { log, config, out } => run_replay(&log, &config, &out),
        Command::GenLog {
            config,
            pi,
            horizon,
            out,
        } => gen_log(&config, pi, horizon, &out),
        Command::Diagnostics { trace, dim } => diagnostics(&trace, dim),
    }
}

fn simulate(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = ExperimentConfig::from_file(config_path)?;
    let dir = match (out, &config.output_path) {
        (Some(dir), _) => dir.to_owned(),
        (None, Some(dir)) => dir.clone(),
        (None, None) => bail!("no output directory: pass --out or set output_path in the config"),
    };
    let summary = run_to_dir(&config, &dir)?;
    println!(
        "wrote {} trials x {} steps to {} (final median cumulative regret {:.4})",
        config.trials,
        config.horizon,
        dir.display(),
        summary.final_median_cum_regret
    );
    Ok(())
}

fn run_replay(log_path: &Path, config_path: &Path, out: &Path) -> Result<()> {
    let started = Instant::now();
    let config = ExperimentConfig::from_file(config_path)?;
    let log = read_log_file(log_path)
        .with_context(|| format!("reading log {}", log_path.display()))?;
    let map = config.environment.feature_map()?;
    let mut rng = trial_rng(config.master_seed, 0);
    let result = match config.algorithm {
        Algorithm::ActionCentered => {
            let mut policy = ActionCenteredBandit::new(map, config.bounds, config.v)?;
            replay(&log, &mut policy as &mut dyn BanditPolicy, &mut rng)?
        }
        Algorithm::Benchmark => {
            let mut policy = BenchmarkBandit::new(map, config.bounds, config.v)?;
            replay(&log, &mut policy as &mut dyn BanditPolicy, &mut rng)?
        }
    };
    fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let summary = serde_json::json!({
        "config": config,
        "log": log_path.display().to_string(),
        "replay": result,
        "wall_time_secs": started.elapsed().as_secs_f64(),
    });
    let path = out.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    match result.value_estimate {
        Some(value) => println!(
            "accepted {}/{} events, value estimate {:.6}",
            result.accepted_count, result.total_count, value
        ),
        None => println!(
            "accepted 0/{} events: estimate is degenerate",
            result.total_count
        ),
    }
    Ok(())
}

fn gen_log(config_path: &Path, pi: f64, horizon: usize, out: &Path) -> Result<()> {
    let config = ExperimentConfig::from_file(config_path)?;
    let mut env = config.environment.build()?;
    let mut rng = trial_rng(config.master_seed, 0);
    let records = generate_log(&mut env, pi, horizon, &mut rng)?;
    write_log_file(out, &records)
        .with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

fn diagnostics(trace_path: &Path, dim: usize) -> Result<()> {
    let text = fs::read_to_string(trace_path)
        .with_context(|| format!("reading {}", trace_path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != "pi,z" {
        bail!("expected header `pi,z`, got {header:?}");
    }
    let mut steps = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (pi, z) = line
            .split_once(',')
            .with_context(|| format!("row {row}: expected two fields"))?;
        let pi: f64 = pi.trim().parse().with_context(|| format!("row {row}: bad pi"))?;
        let z: f64 = z.trim().parse().with_context(|| format!("row {row}: bad z"))?;
        steps.push((pi, z));
    }
    let report = sum_width_diagnostic(&steps, dim)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !report.satisfied {
        bail!(
            "width-sum bound violated: {:.6} > {:.6}",
            report.lhs,
            report.rhs
        );
    }
    Ok(())
}
