//! Action-centered Thompson sampling contextual bandit.
//!
//! A contextual bandit for settings with a "do nothing" action whose baseline
//! reward may be arbitrarily complex and time-varying, while the incremental
//! effect of acting is modeled linearly. Centering the observed reward by
//! `I(a > 0) - π` removes the baseline from the regression target, so the
//! posterior concentrates on the treatment effect alone.
//!
//! The crate bundles:
//!
//! * [`posterior`] — the weighted ridge posterior with Thompson draws,
//!   uncertainty widths, and the closed-form acting probability;
//! * [`policy`] — the action-centered policy, a standard linear Thompson
//!   sampling benchmark under the same probability clipping, and the shared
//!   feature encoding;
//! * [`sim`] — synthetic reward models (nonlinear and drifting baselines),
//!   the constrained-optimal oracle, and per-step regret;
//! * [`replay`] — offline evaluation of a policy on logged decisions, plus a
//!   generator for synthetic logs;
//! * [`experiment`] — seeded multi-trial runs with quantile aggregation and
//!   CSV/JSON output. Trials fan out over rayon when the default `parallel`
//!   feature is enabled and fall back to a sequential loop otherwise.

pub mod experiment;
pub mod policy;
pub mod posterior;
pub mod replay;
pub mod sim;

pub use experiment::{
    run_experiment, run_experiment_sequential, run_to_dir, trial_rng, Algorithm,
    ExperimentConfig, ExperimentError,
};
pub use policy::{
    ActionCenteredBandit, BanditPolicy, BenchmarkBandit, Decision, FeatureMap, PolicyError,
    ProbabilityBounds,
};
pub use posterior::{normal_cdf, FeatureVector, PosteriorError, PosteriorState};
pub use replay::{generate_log, parse_log, replay, write_log, LogRecord, ReplayError, ReplayResult};
pub use sim::{step_regret, EnvironmentModel, OraclePolicy, RegretTrace, SimError};
