//! Simulation environments, the constrained-optimal oracle, and per-step
//! regret.
//!
//! Rewards decompose into a linear treatment effect plus a baseline that the
//! zero action also earns:
//!
//! ```text
//!   r(a) = theta · s_a * I(a > 0) + baseline(context) + sigma * noise
//! ```
//!
//! Two baselines are available: a nonlinear indicator bump around the first
//! context component, and a nonstationary one driven by an AR(1) coefficient
//! process `eta_t = sqrt(1 - rho²) eta_{t-1} + rho n_t` applied to the whole
//! context. The treatment coefficients stay fixed in both.

use crate::policy::{Decision, FeatureMap, PolicyError, ProbabilityBounds};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("coefficient vector has {actual} entries, feature map produces {expected}")]
    CoefficientMismatch { expected: usize, actual: usize },

    #[error("context dimension {len} cannot cover selector index {index}")]
    SelectorOutOfRange { len: usize, index: usize },

    #[error("autocorrelation must lie strictly inside (0, 1), got {0}")]
    InvalidRho(f64),

    #[error("noise level must be finite and nonnegative, got {0}")]
    InvalidNoise(f64),

    #[error("operation requires the nonstationary variant")]
    WrongVariant,

    #[error("noise vector has {actual} entries, expected {expected}")]
    NoiseLengthMismatch { expected: usize, actual: usize },

    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Interaction coefficients fitted to the mobile-intervention data the
/// simulation model is based on: per-action blocks over the first four
/// context components.
pub const ACTION_ONE_EFFECTS: [f64; 4] = [0.116, -0.275, -0.233, 0.0425];
pub const ACTION_TWO_EFFECTS: [f64; 4] = [0.116, 0.275, -0.233, 0.0425];

/// The two-action default coefficient vector.
pub fn default_theta() -> Vec<f64> {
    let mut theta = ACTION_ONE_EFFECTS.to_vec();
    theta.extend_from_slice(&ACTION_TWO_EFFECTS);
    theta
}

#[derive(Debug, Clone)]
enum Baseline {
    Nonlinear { threshold: f64, amplitude: f64 },
    Nonstationary { rho: f64, state: DVector<f64> },
}

/// Generative model for one simulated trial.
#[derive(Debug, Clone)]
pub struct EnvironmentModel {
    theta_true: DVector<f64>,
    context_dim: usize,
    noise_sigma: f64,
    feature_map: FeatureMap,
    baseline: Baseline,
}

impl EnvironmentModel {
    fn build(
        feature_map: FeatureMap,
        context_dim: usize,
        theta_true: Vec<f64>,
        noise_sigma: f64,
        baseline: Baseline,
    ) -> Result<Self, SimError> {
        if theta_true.len() != feature_map.dim() {
            return Err(SimError::CoefficientMismatch {
                expected: feature_map.dim(),
                actual: theta_true.len(),
            });
        }
        if let Some(&bad) = feature_map.selector().iter().find(|&&i| i >= context_dim) {
            return Err(SimError::SelectorOutOfRange {
                len: context_dim,
                index: bad,
            });
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(SimError::InvalidNoise(noise_sigma));
        }
        Ok(Self {
            theta_true: DVector::from_vec(theta_true),
            context_dim,
            noise_sigma,
            feature_map,
            baseline,
        })
    }

    /// Baseline bumps by `amplitude` whenever the first context component
    /// stays within `threshold` of zero.
    pub fn nonlinear(
        feature_map: FeatureMap,
        context_dim: usize,
        theta_true: Vec<f64>,
        noise_sigma: f64,
        threshold: f64,
        amplitude: f64,
    ) -> Result<Self, SimError> {
        Self::build(
            feature_map,
            context_dim,
            theta_true,
            noise_sigma,
            Baseline::Nonlinear { threshold, amplitude },
        )
    }

    /// Baseline `eta_t · context` with the coefficient process started at the
    /// all-ones vector.
    pub fn nonstationary(
        feature_map: FeatureMap,
        context_dim: usize,
        theta_true: Vec<f64>,
        noise_sigma: f64,
        rho: f64,
    ) -> Result<Self, SimError> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(SimError::InvalidRho(rho));
        }
        let state = DVector::from_element(context_dim, 1.0);
        Self::build(
            feature_map,
            context_dim,
            theta_true,
            noise_sigma,
            Baseline::Nonstationary { rho, state },
        )
    }

    pub fn context_dim(&self) -> usize {
        self.context_dim
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    pub fn theta_true(&self) -> &DVector<f64> {
        &self.theta_true
    }

    pub fn is_nonstationary(&self) -> bool {
        matches!(self.baseline, Baseline::Nonstationary { .. })
    }

    /// Current coefficient process, nonstationary variant only.
    pub fn gp_state(&self) -> Option<&DVector<f64>> {
        match &self.baseline {
            Baseline::Nonstationary { state, .. } => Some(state),
            Baseline::Nonlinear { .. } => None,
        }
    }

    /// One iid standard normal context.
    pub fn gen_context<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.context_dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    /// Expected reward of the zero action at the current time.
    pub fn baseline_reward(&self, context: &[f64]) -> f64 {
        match &self.baseline {
            Baseline::Nonlinear { threshold, amplitude } => {
                if context.first().map_or(false, |c| c.abs() < *threshold) {
                    *amplitude
                } else {
                    0.0
                }
            }
            Baseline::Nonstationary { state, .. } => state
                .iter()
                .zip(context.iter())
                .map(|(e, c)| e * c)
                .sum(),
        }
    }

    /// Advance the coefficient process by one step. Callers step once per
    /// decision point, before generating that point's context.
    pub fn gp_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), SimError> {
        let noise: Vec<f64> = (0..self.context_dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.gp_step_with(&noise)
    }

    /// Advance with an injected innovation vector (deterministic seam).
    pub fn gp_step_with(&mut self, noise: &[f64]) -> Result<(), SimError> {
        match &mut self.baseline {
            Baseline::Nonlinear { .. } => Err(SimError::WrongVariant),
            Baseline::Nonstationary { rho, state } => {
                if noise.len() != state.len() {
                    return Err(SimError::NoiseLengthMismatch {
                        expected: state.len(),
                        actual: noise.len(),
                    });
                }
                let keep = (1.0 - *rho * *rho).sqrt();
                for (s, n) in state.iter_mut().zip(noise.iter()) {
                    *s = keep * *s + *rho * n;
                }
                Ok(())
            }
        }
    }

    /// Treatment effect `theta · s_a` for a nonzero action, zero for action 0.
    pub fn true_differential(&self, context: &[f64], action: usize) -> Result<f64, SimError> {
        if action == 0 {
            return Ok(0.0);
        }
        let s = self.feature_map.build(context, action)?;
        Ok(s.dot(&self.theta_true))
    }

    /// Draw one realized reward for the given action.
    pub fn realize_reward<R: Rng + ?Sized>(
        &self,
        context: &[f64],
        action: usize,
        rng: &mut R,
    ) -> Result<f64, SimError> {
        let interaction = self.true_differential(context, action)?;
        let noise: f64 = rng.sample(StandardNormal);
        Ok(interaction + self.baseline_reward(context) + self.noise_sigma * noise)
    }

    /// The probability-constrained optimal policy at this context.
    ///
    /// The best nonzero arm gets `pi_max` when its effect is strictly
    /// positive; otherwise the zero action is optimal and the best nonzero
    /// arm keeps the floor probability `pi_min`. At an exact zero effect both
    /// choices earn the same, and the zero action is picked for determinism.
    pub fn oracle_policy(
        &self,
        context: &[f64],
        bounds: ProbabilityBounds,
    ) -> Result<OraclePolicy, SimError> {
        let n = self.feature_map.n_actions();
        let mut best_nonzero = 1;
        let mut best_value = self.true_differential(context, 1)?;
        for action in 2..=n {
            let value = self.true_differential(context, action)?;
            if value > best_value {
                best_nonzero = action;
                best_value = value;
            }
        }
        let a_star = if best_value > 0.0 { best_nonzero } else { 0 };
        let pi_star = if a_star != 0 { bounds.pi_max } else { bounds.pi_min };
        Ok(OraclePolicy {
            a_star,
            best_nonzero,
            pi_star,
            expected_differential: pi_star * best_value,
        })
    }
}

/// Constrained-optimal play at one decision point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePolicy {
    /// Optimal action, possibly 0.
    pub a_star: usize,
    /// Best nonzero arm regardless of sign.
    pub best_nonzero: usize,
    /// Probability the oracle assigns to `best_nonzero`.
    pub pi_star: f64,
    /// Expected differential reward of the oracle: `pi_star * theta · s*`.
    pub expected_differential: f64,
}

/// Expected differential regret of one decision against the oracle.
pub fn step_regret(
    oracle: &OraclePolicy,
    decision: &Decision,
    env: &EnvironmentModel,
    context: &[f64],
) -> Result<f64, SimError> {
    let value = env.true_differential(context, decision.candidate_action)?;
    Ok(oracle.expected_differential - decision.pi * value)
}

/// Per-step regret and its running sum across one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub per_step: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl RegretTrace {
    pub fn from_per_step(per_step: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(per_step.len());
        let mut total = 0.0;
        for r in &per_step {
            total += r;
            cumulative.push(total);
        }
        Self { per_step, cumulative }
    }

    pub fn len(&self) -> usize {
        self.per_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_step.is_empty()
    }

    pub fn final_cumulative(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}
