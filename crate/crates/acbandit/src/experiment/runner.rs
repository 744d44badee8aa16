//! Seeded multi-trial execution.
//!
//! Trials are independent: trial `i` owns a fresh environment, a fresh
//! bandit, and RNG stream `i` of the ChaCha12 keystream keyed by the master
//! seed. Results are collected in trial order, so the output is identical
//! whether trials run sequentially or across a thread pool.

use super::config::{Algorithm, ExperimentConfig};
use super::theory::{sum_width_diagnostic, WidthDiagnostic};
use super::{aggregate, AggregateCurve, ExperimentError};
use crate::policy::{ActionCenteredBandit, BenchmarkBandit, Decision};
use crate::sim::{step_regret, EnvironmentModel, RegretTrace};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// RNG stream for one trial: `master_seed` keys the cipher, the trial index
/// selects a disjoint stream.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Everything recorded for one trial.
#[derive(Debug, Clone)]
pub struct TrialTrace {
    pub trial: usize,
    pub regret: RegretTrace,
    /// Acting probability emitted at each step.
    pub pis: Vec<f64>,
    /// Posterior width of the decision direction at each step.
    pub widths: Vec<f64>,
}

/// Multi-trial output: per-trial traces plus the aggregate curve and one
/// width diagnostic per trial (empty when the horizon is below 2).
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trials: Vec<TrialTrace>,
    pub aggregate: AggregateCurve,
    pub width_checks: Vec<WidthDiagnostic>,
}

trait StepPolicy {
    fn step_decide(
        &mut self,
        context: &[f64],
        rng: &mut ChaCha12Rng,
    ) -> Result<(Decision, f64), ExperimentError>;

    fn step_observe(
        &mut self,
        context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), ExperimentError>;
}

impl StepPolicy for ActionCenteredBandit {
    fn step_decide(
        &mut self,
        context: &[f64],
        rng: &mut ChaCha12Rng,
    ) -> Result<(Decision, f64), ExperimentError> {
        let decision = self.decide(context, rng)?;
        let width = self.decision_width(&decision)?;
        Ok((decision, width))
    }

    fn step_observe(
        &mut self,
        _context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), ExperimentError> {
        self.observe(decision, reward)?;
        Ok(())
    }
}

impl StepPolicy for BenchmarkBandit {
    fn step_decide(
        &mut self,
        context: &[f64],
        rng: &mut ChaCha12Rng,
    ) -> Result<(Decision, f64), ExperimentError> {
        let decision = self.decide(context, rng)?;
        let width = self.decision_width(context, &decision)?;
        Ok((decision, width))
    }

    fn step_observe(
        &mut self,
        context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), ExperimentError> {
        self.observe(context, decision, reward)?;
        Ok(())
    }
}

fn run_steps<P: StepPolicy>(
    config: &ExperimentConfig,
    env: &mut EnvironmentModel,
    policy: &mut P,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), ExperimentError> {
    let horizon = config.horizon;
    let mut per_step = Vec::with_capacity(horizon);
    let mut pis = Vec::with_capacity(horizon);
    let mut widths = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        if env.is_nonstationary() {
            env.gp_step(rng)?;
        }
        let context = env.gen_context(rng);
        let (decision, width) = policy.step_decide(&context, rng)?;
        let reward = env.realize_reward(&context, decision.realized_action, rng)?;
        let oracle = env.oracle_policy(&context, config.bounds)?;
        per_step.push(step_regret(&oracle, &decision, env, &context)?);
        pis.push(decision.pi);
        widths.push(width);
        policy.step_observe(&context, &decision, reward)?;
    }
    Ok((per_step, pis, widths))
}

/// Run a single trial of the configured experiment.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialTrace, ExperimentError> {
    let mut rng = trial_rng(config.master_seed, trial as u64);
    let mut env = config.environment.build()?;
    let map = env.feature_map().clone();
    let (per_step, pis, widths) = match config.algorithm {
        Algorithm::ActionCentered => {
            let mut bandit = ActionCenteredBandit::new(map, config.bounds, config.v)?;
            run_steps(config, &mut env, &mut bandit, &mut rng)?
        }
        Algorithm::Benchmark => {
            let mut bandit = BenchmarkBandit::new(map, config.bounds, config.v)?;
            run_steps(config, &mut env, &mut bandit, &mut rng)?
        }
    };
    Ok(TrialTrace {
        trial,
        regret: RegretTrace::from_per_step(per_step),
        pis,
        widths,
    })
}

fn finish(
    config: &ExperimentConfig,
    trials: Vec<TrialTrace>,
) -> Result<ExperimentResult, ExperimentError> {
    let traces: Vec<RegretTrace> = trials.iter().map(|t| t.regret.clone()).collect();
    let aggregate = aggregate(&traces)?;
    let width_checks = if config.horizon >= 2 {
        trials
            .iter()
            .map(|t| {
                let steps: Vec<(f64, f64)> = t
                    .pis
                    .iter()
                    .copied()
                    .zip(t.widths.iter().copied())
                    .collect();
                sum_width_diagnostic(&steps, config.policy_dim())
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    Ok(ExperimentResult {
        trials,
        aggregate,
        width_checks,
    })
}

/// Run all trials sequentially on the calling thread.
pub fn run_experiment_sequential(
    config: &ExperimentConfig,
) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let trials = (0..config.trials)
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>, _>>()?;
    finish(config, trials)
}

/// Run all trials, fanning out across the rayon pool when the `parallel`
/// feature is enabled. Output is identical to the sequential runner.
#[cfg(feature = "parallel")]
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>, _>>()?;
    finish(config, trials)
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    run_experiment_sequential(config)
}
