//! JSON experiment configuration.
//!
//! Plain key-value documents keep experiment records human-editable and
//! diffable. Unknown keys are rejected so config typos fail loudly.

use super::ExperimentError;
use crate::policy::{FeatureMap, ProbabilityBounds};
use crate::sim::{default_theta, EnvironmentModel};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ActionCentered,
    Benchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentVariant {
    Nonlinear,
    Nonstationary,
}

fn default_context_dim() -> usize {
    7
}

fn default_n_actions() -> usize {
    2
}

fn default_selector() -> Vec<usize> {
    vec![0, 1, 2, 3]
}

fn default_noise_sigma() -> f64 {
    1.0
}

fn default_gp_rho() -> f64 {
    0.1
}

fn default_nonlinear_threshold() -> f64 {
    0.8
}

fn default_nonlinear_amplitude() -> f64 {
    2.0
}

fn default_bounds() -> ProbabilityBounds {
    ProbabilityBounds {
        pi_min: 0.2,
        pi_max: 0.8,
    }
}

fn default_v() -> f64 {
    1.0
}

fn default_horizon() -> usize {
    2000
}

fn default_trials() -> usize {
    100
}

/// Generative-model half of the configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub variant: EnvironmentVariant,
    #[serde(default = "default_context_dim")]
    pub context_dim: usize,
    #[serde(default = "default_n_actions")]
    pub n_actions: usize,
    #[serde(default = "default_selector")]
    pub selector: Vec<usize>,
    /// True interaction coefficients, length `n_actions * selector.len()`.
    #[serde(default = "default_theta")]
    pub theta: Vec<f64>,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    /// AR(1) innovation weight, nonstationary variant only.
    #[serde(default = "default_gp_rho")]
    pub gp_rho: f64,
    #[serde(default = "default_nonlinear_threshold")]
    pub nonlinear_threshold: f64,
    #[serde(default = "default_nonlinear_amplitude")]
    pub nonlinear_amplitude: f64,
}

impl EnvironmentConfig {
    pub fn nonlinear() -> Self {
        Self {
            variant: EnvironmentVariant::Nonlinear,
            context_dim: default_context_dim(),
            n_actions: default_n_actions(),
            selector: default_selector(),
            theta: default_theta(),
            noise_sigma: default_noise_sigma(),
            gp_rho: default_gp_rho(),
            nonlinear_threshold: default_nonlinear_threshold(),
            nonlinear_amplitude: default_nonlinear_amplitude(),
        }
    }

    pub fn nonstationary() -> Self {
        Self {
            variant: EnvironmentVariant::Nonstationary,
            ..Self::nonlinear()
        }
    }

    pub fn feature_map(&self) -> Result<FeatureMap, ExperimentError> {
        Ok(FeatureMap::new(self.n_actions, self.selector.clone())?)
    }

    /// Instantiate a fresh environment for one trial.
    pub fn build(&self) -> Result<EnvironmentModel, ExperimentError> {
        let map = self.feature_map()?;
        let env = match self.variant {
            EnvironmentVariant::Nonlinear => EnvironmentModel::nonlinear(
                map,
                self.context_dim,
                self.theta.clone(),
                self.noise_sigma,
                self.nonlinear_threshold,
                self.nonlinear_amplitude,
            )?,
            EnvironmentVariant::Nonstationary => EnvironmentModel::nonstationary(
                map,
                self.context_dim,
                self.theta.clone(),
                self.noise_sigma,
                self.gp_rho,
            )?,
        };
        Ok(env)
    }
}

/// Full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub environment: EnvironmentConfig,
    #[serde(default = "default_bounds")]
    pub bounds: ProbabilityBounds,
    /// Posterior sampling scale. The theory value is available through
    /// [`sampling_scale`](super::sampling_scale); desk-scale runs default to 1.
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub master_seed: u64,
    /// Default output directory; the CLI `--out` flag overrides it.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Standard two-action setup against the nonlinear baseline.
    pub fn nonlinear_default(algorithm: Algorithm, master_seed: u64) -> Self {
        Self {
            algorithm,
            environment: EnvironmentConfig::nonlinear(),
            bounds: default_bounds(),
            v: default_v(),
            horizon: default_horizon(),
            trials: default_trials(),
            master_seed,
            output_path: None,
        }
    }

    /// Standard two-action setup against the drifting baseline.
    pub fn nonstationary_default(algorithm: Algorithm, master_seed: u64) -> Self {
        Self {
            environment: EnvironmentConfig::nonstationary(),
            ..Self::nonlinear_default(algorithm, master_seed)
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ExperimentError> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_owned(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text).map_err(|source| ExperimentError::Json {
            path: path.to_owned(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.horizon == 0 {
            return Err(ExperimentError::InvalidConfig("horizon must be positive".into()));
        }
        if self.trials == 0 {
            return Err(ExperimentError::InvalidConfig("trials must be positive".into()));
        }
        if !(self.v.is_finite() && self.v > 0.0) {
            return Err(ExperimentError::InvalidConfig(format!(
                "v must be positive and finite, got {}",
                self.v
            )));
        }
        ProbabilityBounds::new(self.bounds.pi_min, self.bounds.pi_max)
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        // Environment construction performs the remaining shape checks.
        self.environment
            .build()
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    /// Posterior dimension of the configured algorithm.
    pub fn policy_dim(&self) -> usize {
        let k = self.environment.selector.len();
        match self.algorithm {
            Algorithm::ActionCentered => self.environment.n_actions * k,
            Algorithm::Benchmark => self.environment.n_actions * (k + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_documents_fill_in_defaults() {
        let text = r#"{
            "algorithm": "action_centered",
            "environment": {"variant": "nonlinear"},
            "master_seed": 7
        }"#;
        let config = ExperimentConfig::from_json_str(text).unwrap();
        assert_eq!(config.horizon, 2000);
        assert_eq!(config.trials, 100);
        assert_eq!(config.v, 1.0);
        assert_eq!(config.bounds.pi_min, 0.2);
        assert_eq!(config.bounds.pi_max, 0.8);
        assert_eq!(config.environment.context_dim, 7);
        assert_eq!(config.environment.theta.len(), 8);
        assert_eq!(config.policy_dim(), 8);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let unknown = r#"{
            "algorithm": "action_centered",
            "environment": {"variant": "nonlinear"},
            "master_seed": 7,
            "horizont": 10
        }"#;
        assert!(ExperimentConfig::from_json_str(unknown).is_err());

        let mut config =
            ExperimentConfig::nonlinear_default(Algorithm::ActionCentered, 1);
        config.trials = 0;
        assert!(config.validate().is_err());

        let mut config =
            ExperimentConfig::nonlinear_default(Algorithm::Benchmark, 1);
        config.environment.theta = vec![1.0; 3];
        assert!(config.validate().is_err());

        let mut config =
            ExperimentConfig::nonstationary_default(Algorithm::ActionCentered, 1);
        config.environment.gp_rho = 1.5;
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = ExperimentConfig::nonstationary_default(Algorithm::Benchmark, 42);
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back = ExperimentConfig::from_json_str(&text).unwrap();
        assert_eq!(back.master_seed, 42);
        assert_eq!(back.algorithm, Algorithm::Benchmark);
        assert_eq!(back.environment.variant, EnvironmentVariant::Nonstationary);
        assert_eq!(back.policy_dim(), 10);
    }
}
