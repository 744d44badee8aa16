//! Experiment orchestration: configuration, the seeded multi-trial runner,
//! quantile aggregation, theory-constant helpers, and file output.

mod aggregate;
mod config;
mod output;
mod runner;
mod theory;

pub use aggregate::{aggregate, quantile, AggregateCurve};
pub use config::{Algorithm, EnvironmentConfig, EnvironmentVariant, ExperimentConfig};
pub use output::{run_to_dir, write_aggregate_csv, write_trials_csv, Summary, WidthSummary};
pub use runner::{
    run_experiment, run_experiment_sequential, run_trial, trial_rng, ExperimentResult, TrialTrace,
};
pub use theory::{confidence_width, sampling_scale, sum_width_diagnostic, WidthDiagnostic};

use crate::policy::PolicyError;
use crate::sim::SimError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("no traces to aggregate")]
    NoTraces,

    #[error("traces have unequal lengths")]
    RaggedTraces,

    #[error("diagnostic needs a horizon of at least 2, got {0}")]
    HorizonTooShort(usize),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error(transparent)]
    Policy(#[from] PolicyError),

    #[error(transparent)]
    Sim(#[from] SimError),
}
