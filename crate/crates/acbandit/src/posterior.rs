//! Weighted ridge posterior for the action-centered bandit.
//!
//! The state tracks the sufficient statistics of a unit-penalized weighted
//! least-squares fit of the differential reward:
//!
//! ```text
//!   B     = I + Σ_t π_t(1-π_t) s_t s_t^T
//!   b     = Σ_t s_t (I(a_t > 0) - π_t) r_t
//!   mean  = B^{-1} b
//! ```
//!
//! Thompson draws come from `N(mean, v² B^{-1})`. `B` starts at the identity
//! and only gains positive-semidefinite rank-1 terms, so it stays symmetric
//! positive definite and its Cholesky factor always exists. The factor is
//! recomputed on every update (dimensions here are single digits; a rank-1
//! factor update would not be worth the bookkeeping).

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosteriorError {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("posterior scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("dimension mismatch: state has {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
}

/// Standard normal CDF via the complementary error function.
///
/// Absolute error is bounded by 1e-7 over the whole real line (the
/// underlying `erfc` is accurate to near machine precision).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Per-action interaction features `s_{t,a}`.
///
/// Construction rejects non-finite entries, so every `FeatureVector` in
/// circulation is safe to feed into the posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(DVector<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, PosteriorError> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(PosteriorError::NonFinite("feature value"));
        }
        Ok(Self(DVector::from_vec(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub(crate) fn inner(&self) -> &DVector<f64> {
        &self.0
    }

    /// Component-wise difference, used for benchmark decision widths.
    pub fn sub(&self, other: &FeatureVector) -> Result<FeatureVector, PosteriorError> {
        if self.dim() != other.dim() {
            return Err(PosteriorError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(FeatureVector(&self.0 - &other.0))
    }

    pub fn dot(&self, theta: &DVector<f64>) -> f64 {
        self.0.dot(theta)
    }
}

/// Posterior state of the weighted ridge regression.
#[derive(Debug, Clone)]
pub struct PosteriorState {
    dim: usize,
    /// B: regularized weighted Gram matrix, symmetric positive definite.
    precision: DMatrix<f64>,
    /// b: accumulated centered-reward response vector.
    response: DVector<f64>,
    /// Cached solution of B * mean = b.
    mean: DVector<f64>,
    /// Lower Cholesky factor of `precision`, kept in sync with it.
    factor: DMatrix<f64>,
    scale: f64,
    update_count: u64,
}

impl PosteriorState {
    /// Fresh state: B = I, b = 0, mean = 0.
    pub fn new(dim: usize, scale: f64) -> Result<Self, PosteriorError> {
        if dim == 0 {
            return Err(PosteriorError::ZeroDimension);
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(PosteriorError::InvalidScale(scale));
        }
        Ok(Self {
            dim,
            precision: DMatrix::identity(dim, dim),
            response: DVector::zeros(dim),
            mean: DVector::zeros(dim),
            factor: DMatrix::identity(dim, dim),
            scale,
            update_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    /// Posterior mean (the current coefficient estimate).
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    fn check_dim(&self, features: &FeatureVector) -> Result<(), PosteriorError> {
        if features.dim() != self.dim {
            return Err(PosteriorError::DimensionMismatch {
                expected: self.dim,
                actual: features.dim(),
            });
        }
        Ok(())
    }

    /// Action-centered update:
    /// `B += π(1-π) s s^T`, `b += s (I(a>0) - π) r`, mean re-solved.
    ///
    /// The state is untouched when any argument is rejected.
    pub fn update(
        &mut self,
        features: &FeatureVector,
        pi: f64,
        action_nonzero: bool,
        reward: f64,
    ) -> Result<(), PosteriorError> {
        self.check_dim(features)?;
        if !(pi > 0.0 && pi < 1.0) {
            return Err(PosteriorError::InvalidProbability(pi));
        }
        if !reward.is_finite() {
            return Err(PosteriorError::NonFinite("reward"));
        }
        let indicator = if action_nonzero { 1.0 } else { 0.0 };
        self.apply_rank_one(features, pi * (1.0 - pi), (indicator - pi) * reward)
    }

    /// Plain least-squares update used by the benchmark comparator:
    /// `B += x x^T`, `b += x r`.
    pub fn update_unweighted(
        &mut self,
        features: &FeatureVector,
        reward: f64,
    ) -> Result<(), PosteriorError> {
        self.check_dim(features)?;
        if !reward.is_finite() {
            return Err(PosteriorError::NonFinite("reward"));
        }
        self.apply_rank_one(features, 1.0, reward)
    }

    fn apply_rank_one(
        &mut self,
        features: &FeatureVector,
        weight: f64,
        response_coef: f64,
    ) -> Result<(), PosteriorError> {
        let s = features.inner();
        self.precision.ger(weight, s, s, 1.0);
        self.response.axpy(response_coef, s, 1.0);
        self.refresh()?;
        self.update_count += 1;
        Ok(())
    }

    /// Re-factorize B and re-solve for the mean.
    fn refresh(&mut self) -> Result<(), PosteriorError> {
        let chol = Cholesky::new(self.precision.clone())
            .ok_or(PosteriorError::NotPositiveDefinite)?;
        self.mean = chol.solve(&self.response);
        self.factor = chol.unpack();
        Ok(())
    }

    /// One draw from `N(mean, v² B^{-1})`.
    ///
    /// With `B = L L^T`, the vector `L^{-T} z` for standard normal `z` has
    /// covariance exactly `B^{-1}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let spread = self
            .factor
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has positive diagonal");
        &self.mean + self.scale * spread
    }

    /// Posterior width `z = sqrt(s^T B^{-1} s)`; zero iff `s = 0`.
    pub fn z_width(&self, features: &FeatureVector) -> Result<f64, PosteriorError> {
        self.check_dim(features)?;
        let half = self
            .factor
            .solve_lower_triangular(features.inner())
            .expect("Cholesky factor has positive diagonal");
        Ok(half.norm())
    }

    /// Closed-form probability that a fresh Thompson draw scores `features`
    /// above zero: `Φ(s·mean / (v z))`. Defined as 0.5 for `s = 0`, where the
    /// score is almost surely zero.
    pub fn prob_positive(&self, features: &FeatureVector) -> Result<f64, PosteriorError> {
        let width = self.z_width(features)?;
        if width == 0.0 {
            return Ok(0.5);
        }
        Ok(normal_cdf(features.dot(&self.mean) / (self.scale * width)))
    }

    /// Plain-text snapshot: dimension, B rows, b, v. Floats are written in
    /// shortest round-trip notation so load/save is lossless.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{}", self.precision[(i, j)]))
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        let b: Vec<String> = self.response.iter().map(|x| format!("{x}")).collect();
        writeln!(out, "{}", b.join(" "))?;
        writeln!(out, "{}", self.scale)
    }

    /// Rebuild a state from a snapshot produced by [`write_snapshot`].
    ///
    /// The update counter restarts at zero; it counts updates applied to the
    /// in-memory state, not lifetime history.
    ///
    /// [`write_snapshot`]: PosteriorState::write_snapshot
    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self, PosteriorError> {
        let mut tokens = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| PosteriorError::MalformedSnapshot(e.to_string()))?;
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        let mut it = tokens.into_iter();
        let mut next_f64 = |what: &str| -> Result<f64, PosteriorError> {
            let tok = it
                .next()
                .ok_or_else(|| PosteriorError::MalformedSnapshot(format!("missing {what}")))?;
            tok.parse::<f64>()
                .map_err(|_| PosteriorError::MalformedSnapshot(format!("bad {what}: {tok:?}")))
        };
        let dim = next_f64("dimension")? as usize;
        if dim == 0 {
            return Err(PosteriorError::ZeroDimension);
        }
        let mut precision = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let x = next_f64("matrix entry")?;
                if !x.is_finite() {
                    return Err(PosteriorError::NonFinite("matrix entry"));
                }
                precision[(i, j)] = x;
            }
        }
        let mut response = DVector::zeros(dim);
        for i in 0..dim {
            let x = next_f64("response entry")?;
            if !x.is_finite() {
                return Err(PosteriorError::NonFinite("response entry"));
            }
            response[i] = x;
        }
        let scale = next_f64("scale")?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(PosteriorError::InvalidScale(scale));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let gap = (precision[(i, j)] - precision[(j, i)]).abs();
                if gap > 1e-9 * (1.0 + precision[(i, j)].abs()) {
                    return Err(PosteriorError::MalformedSnapshot(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut state = Self {
            dim,
            precision,
            response,
            mean: DVector::zeros(dim),
            factor: DMatrix::identity(dim, dim),
            scale,
            update_count: 0,
        };
        state.refresh()?;
        Ok(state)
    }
}
