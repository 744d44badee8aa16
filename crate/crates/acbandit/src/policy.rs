//! Action-centered Thompson sampling and the benchmark comparator.
//!
//! Both policies run the same decision skeleton: draw coefficients from the
//! posterior, pick the best nonzero action under the draw, compute a clipped
//! probability of acting at all, then randomize between that candidate and
//! the zero action. They differ in how the probability is formed and in how
//! observations feed back into the posterior:
//!
//! * action-centered — probability `Φ(s·mean / (v z))` on the candidate's
//!   features; update weights by `π(1-π)` and centers the reward with
//!   `I(a > 0) - π`.
//! * benchmark — plain linear Thompson sampling over its own feature
//!   encoding; probability from the candidate-minus-zero difference vector;
//!   raw `B += x x^T`, `b += x r` update on the realized action's features.

use crate::posterior::{FeatureVector, PosteriorError, PosteriorState};
use nalgebra::DVector;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("probability bounds must satisfy 0 < min <= max < 1, got [{0}, {1}]")]
    InvalidBounds(f64, f64),

    #[error("feature map needs at least one action and one selected component")]
    EmptyFeatureMap,

    #[error("action {action} out of range 1..={n_actions}")]
    ActionOutOfRange { action: usize, n_actions: usize },

    #[error("context has {len} components, selector needs index {index}")]
    ContextTooShort { len: usize, index: usize },

    #[error("no candidate actions supplied")]
    EmptyActionSet,

    #[error(transparent)]
    Posterior(#[from] PosteriorError),
}

/// Clipping range for the probability of taking a nonzero action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBounds {
    pub pi_min: f64,
    pub pi_max: f64,
}

impl ProbabilityBounds {
    pub fn new(pi_min: f64, pi_max: f64) -> Result<Self, PolicyError> {
        if !(pi_min > 0.0 && pi_min <= pi_max && pi_max < 1.0) {
            return Err(PolicyError::InvalidBounds(pi_min, pi_max));
        }
        Ok(Self { pi_min, pi_max })
    }

    /// `max(pi_min, min(pi_max, p))`.
    pub fn clip(&self, p: f64) -> f64 {
        p.clamp(self.pi_min, self.pi_max)
    }

    pub(crate) fn validate(&self) -> Result<(), PolicyError> {
        Self::new(self.pi_min, self.pi_max).map(|_| ())
    }
}

/// Stacked per-action feature encoding.
///
/// Action `a` (1-based) occupies block `a - 1` of the output; the block holds
/// the context components named by `selector` and every other block is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    n_actions: usize,
    selector: Vec<usize>,
}

impl FeatureMap {
    pub fn new(n_actions: usize, selector: Vec<usize>) -> Result<Self, PolicyError> {
        if n_actions == 0 || selector.is_empty() {
            return Err(PolicyError::EmptyFeatureMap);
        }
        Ok(Self { n_actions, selector })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Block size K.
    pub fn per_action_dim(&self) -> usize {
        self.selector.len()
    }

    /// Output dimension d = N * K.
    pub fn dim(&self) -> usize {
        self.n_actions * self.selector.len()
    }

    pub fn selector(&self) -> &[usize] {
        &self.selector
    }

    fn select(&self, context: &[f64]) -> Result<Vec<f64>, PolicyError> {
        self.selector
            .iter()
            .map(|&i| {
                context.get(i).copied().ok_or(PolicyError::ContextTooShort {
                    len: context.len(),
                    index: i,
                })
            })
            .collect()
    }

    /// Features for one nonzero action.
    pub fn build(&self, context: &[f64], action: usize) -> Result<FeatureVector, PolicyError> {
        if action == 0 || action > self.n_actions {
            return Err(PolicyError::ActionOutOfRange {
                action,
                n_actions: self.n_actions,
            });
        }
        let block = self.select(context)?;
        let k = block.len();
        let mut values = vec![0.0; self.dim()];
        values[(action - 1) * k..action * k].copy_from_slice(&block);
        Ok(FeatureVector::new(values)?)
    }

    /// Features for every nonzero action, indexed `action - 1`.
    pub fn build_all(&self, context: &[f64]) -> Result<Vec<FeatureVector>, PolicyError> {
        (1..=self.n_actions).map(|a| self.build(context, a)).collect()
    }
}

/// One decision point: the Thompson candidate, the clipped probability of
/// acting, and the realized action (candidate or zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Nonzero candidate picked by the posterior draw (1-based).
    pub candidate_action: usize,
    /// Clipped probability of playing the candidate.
    pub pi: f64,
    /// Either `candidate_action` or 0.
    pub realized_action: usize,
    /// The candidate's features, carried along so the observation step needs
    /// no re-derivation.
    pub candidate_features: FeatureVector,
}

/// Index of the maximal score, ties resolved to the lowest index.
fn argmax(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, score) in scores.enumerate() {
        match best {
            Some((_, top)) if score <= top => {}
            _ => best = Some((i, score)),
        }
    }
    best.map(|(i, _)| i)
}

fn randomize<R: Rng + ?Sized>(candidate: usize, pi: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < pi {
        candidate
    } else {
        0
    }
}

/// Action-centered decision under an injected coefficient draw.
///
/// This is the deterministic seam used by tests; `rng` only settles the
/// act/skip randomization. `features` is indexed by `action - 1`.
pub fn choose_action_centered_with<R: Rng + ?Sized>(
    state: &PosteriorState,
    features: &[FeatureVector],
    bounds: ProbabilityBounds,
    theta_draw: &DVector<f64>,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    bounds.validate()?;
    if features.is_empty() {
        return Err(PolicyError::EmptyActionSet);
    }
    let picked = argmax(features.iter().map(|s| s.dot(theta_draw))).expect("non-empty");
    let candidate = &features[picked];
    let pi = bounds.clip(state.prob_positive(candidate)?);
    Ok(Decision {
        candidate_action: picked + 1,
        pi,
        realized_action: randomize(picked + 1, pi, rng),
        candidate_features: candidate.clone(),
    })
}

/// One action-centered Thompson decision.
pub fn choose_action_centered<R: Rng + ?Sized>(
    state: &PosteriorState,
    features: &[FeatureVector],
    bounds: ProbabilityBounds,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    let draw = state.sample(rng);
    choose_action_centered_with(state, features, bounds, &draw, rng)
}

/// Feed the observed reward back through the centered update. The update
/// always uses the candidate's features, whether or not the zero action was
/// realized.
pub fn observe_action_centered(
    state: &mut PosteriorState,
    decision: &Decision,
    reward: f64,
) -> Result<(), PolicyError> {
    state.update(
        &decision.candidate_features,
        decision.pi,
        decision.realized_action > 0,
        reward,
    )?;
    Ok(())
}

/// Benchmark decision under an injected draw. `features` is indexed by
/// action, zero action included at index 0.
pub fn choose_benchmark_with<R: Rng + ?Sized>(
    state: &PosteriorState,
    features: &[FeatureVector],
    bounds: ProbabilityBounds,
    theta_draw: &DVector<f64>,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    bounds.validate()?;
    if features.len() < 2 {
        return Err(PolicyError::EmptyActionSet);
    }
    let picked = argmax(features[1..].iter().map(|x| x.dot(theta_draw))).expect("non-empty");
    let candidate = &features[picked + 1];
    // The acting probability compares the candidate against the zero action,
    // so any shared feature block cancels out of the difference.
    let diff = candidate.sub(&features[0])?;
    let pi = bounds.clip(state.prob_positive(&diff)?);
    Ok(Decision {
        candidate_action: picked + 1,
        pi,
        realized_action: randomize(picked + 1, pi, rng),
        candidate_features: candidate.clone(),
    })
}

/// One benchmark Thompson decision.
pub fn choose_benchmark<R: Rng + ?Sized>(
    state: &PosteriorState,
    features: &[FeatureVector],
    bounds: ProbabilityBounds,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    let draw = state.sample(rng);
    choose_benchmark_with(state, features, bounds, &draw, rng)
}

/// Benchmark observation: plain least-squares update on the features of the
/// action that was actually played (the zero action's features when the
/// candidate was skipped).
pub fn observe_benchmark(
    state: &mut PosteriorState,
    realized_features: &FeatureVector,
    reward: f64,
) -> Result<(), PolicyError> {
    state.update_unweighted(realized_features, reward)?;
    Ok(())
}

/// A ready-to-run action-centered bandit: posterior plus feature map plus
/// clipping bounds.
#[derive(Debug, Clone)]
pub struct ActionCenteredBandit {
    posterior: PosteriorState,
    map: FeatureMap,
    bounds: ProbabilityBounds,
}

impl ActionCenteredBandit {
    pub fn new(map: FeatureMap, bounds: ProbabilityBounds, v: f64) -> Result<Self, PolicyError> {
        bounds.validate()?;
        Ok(Self {
            posterior: PosteriorState::new(map.dim(), v)?,
            map,
            bounds,
        })
    }

    pub fn posterior(&self) -> &PosteriorState {
        &self.posterior
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.map
    }

    pub fn decide<R: Rng + ?Sized>(
        &self,
        context: &[f64],
        rng: &mut R,
    ) -> Result<Decision, PolicyError> {
        let features = self.map.build_all(context)?;
        choose_action_centered(&self.posterior, &features, self.bounds, rng)
    }

    pub fn observe(&mut self, decision: &Decision, reward: f64) -> Result<(), PolicyError> {
        observe_action_centered(&mut self.posterior, decision, reward)
    }

    /// Posterior width of the candidate direction at decision time.
    pub fn decision_width(&self, decision: &Decision) -> Result<f64, PolicyError> {
        Ok(self.posterior.z_width(&decision.candidate_features)?)
    }
}

/// The benchmark comparator: standard linear Thompson sampling run under the
/// same probability clipping.
///
/// Its feature encoding stacks `[1; context[selector]]` per action, with the
/// zero action encoded as the all-zero vector. The leading one gives each
/// action an intercept, which is where an unmodeled baseline reward ends up.
#[derive(Debug, Clone)]
pub struct BenchmarkBandit {
    posterior: PosteriorState,
    map: FeatureMap,
    bounds: ProbabilityBounds,
}

impl BenchmarkBandit {
    pub fn new(map: FeatureMap, bounds: ProbabilityBounds, v: f64) -> Result<Self, PolicyError> {
        bounds.validate()?;
        let dim = map.n_actions() * (map.per_action_dim() + 1);
        Ok(Self {
            posterior: PosteriorState::new(dim, v)?,
            map,
            bounds,
        })
    }

    pub fn posterior(&self) -> &PosteriorState {
        &self.posterior
    }

    /// Features for actions 0..=N under the benchmark encoding.
    pub fn build_features(&self, context: &[f64]) -> Result<Vec<FeatureVector>, PolicyError> {
        let block_len = self.map.per_action_dim() + 1;
        let dim = self.map.n_actions() * block_len;
        let mut out = vec![FeatureVector::new(vec![0.0; dim])?];
        for action in 1..=self.map.n_actions() {
            let inner = self.map.build(context, action)?;
            let mut values = vec![0.0; dim];
            let offset = (action - 1) * block_len;
            values[offset] = 1.0;
            let k = self.map.per_action_dim();
            values[offset + 1..offset + block_len]
                .copy_from_slice(&inner.as_slice()[(action - 1) * k..action * k]);
            out.push(FeatureVector::new(values)?);
        }
        Ok(out)
    }

    pub fn decide<R: Rng + ?Sized>(
        &self,
        context: &[f64],
        rng: &mut R,
    ) -> Result<Decision, PolicyError> {
        let features = self.build_features(context)?;
        choose_benchmark(&self.posterior, &features, self.bounds, rng)
    }

    pub fn observe(
        &mut self,
        context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), PolicyError> {
        let features = self.build_features(context)?;
        observe_benchmark(&mut self.posterior, &features[decision.realized_action], reward)
    }

    /// Width of the candidate-minus-zero direction at decision time.
    pub fn decision_width(
        &self,
        context: &[f64],
        decision: &Decision,
    ) -> Result<f64, PolicyError> {
        let features = self.build_features(context)?;
        let diff = features[decision.candidate_action].sub(&features[0])?;
        Ok(self.posterior.z_width(&diff)?)
    }
}

/// The surface offline replay drives: one decision per logged context, one
/// observation per accepted event.
pub trait BanditPolicy {
    fn decide(&mut self, context: &[f64], rng: &mut dyn RngCore) -> Result<Decision, PolicyError>;

    fn observe(
        &mut self,
        context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), PolicyError>;

    /// Number of nonzero actions the policy can emit.
    fn n_actions(&self) -> usize;

    /// Smallest context length the policy can consume.
    fn min_context_dim(&self) -> usize;
}

impl BanditPolicy for ActionCenteredBandit {
    fn decide(&mut self, context: &[f64], rng: &mut dyn RngCore) -> Result<Decision, PolicyError> {
        ActionCenteredBandit::decide(self, context, rng)
    }

    fn observe(
        &mut self,
        _context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), PolicyError> {
        ActionCenteredBandit::observe(self, decision, reward)
    }

    fn n_actions(&self) -> usize {
        self.map.n_actions()
    }

    fn min_context_dim(&self) -> usize {
        self.map.selector().iter().max().map_or(0, |&i| i + 1)
    }
}

impl BanditPolicy for BenchmarkBandit {
    fn decide(&mut self, context: &[f64], rng: &mut dyn RngCore) -> Result<Decision, PolicyError> {
        BenchmarkBandit::decide(self, context, rng)
    }

    fn observe(
        &mut self,
        context: &[f64],
        decision: &Decision,
        reward: f64,
    ) -> Result<(), PolicyError> {
        BenchmarkBandit::observe(self, context, decision, reward)
    }

    fn n_actions(&self) -> usize {
        self.map.n_actions()
    }

    fn min_context_dim(&self) -> usize {
        self.map.selector().iter().max().map_or(0, |&i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn bounds() -> ProbabilityBounds {
        ProbabilityBounds::new(0.2, 0.8).unwrap()
    }

    #[test]
    fn bounds_reject_bad_ranges() {
        assert!(ProbabilityBounds::new(0.0, 0.8).is_err());
        assert!(ProbabilityBounds::new(0.3, 0.2).is_err());
        assert!(ProbabilityBounds::new(0.2, 1.0).is_err());
        assert!(ProbabilityBounds::new(0.5, 0.5).is_ok());
    }

    #[test]
    fn clip_matches_definition() {
        let b = bounds();
        assert_eq!(b.clip(0.5), 0.5);
        assert_eq!(b.clip(0.95), 0.8);
        assert_eq!(b.clip(0.05), 0.2);
    }

    #[test]
    fn feature_blocks_land_in_the_right_slots() {
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        let ctx = [3.0, 7.0];
        assert_eq!(map.build(&ctx, 1).unwrap().as_slice(), &[3.0, 7.0, 0.0, 0.0]);
        assert_eq!(map.build(&ctx, 2).unwrap().as_slice(), &[0.0, 0.0, 3.0, 7.0]);

        let map = FeatureMap::new(2, vec![0, 1, 2, 3]).unwrap();
        let ctx = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let s1 = map.build(&ctx, 1).unwrap();
        assert_eq!(map.dim(), 8);
        assert_eq!(&s1.as_slice()[..4], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(&s1.as_slice()[4..], &[0.0; 4]);
    }

    #[test]
    fn feature_map_rejects_bad_inputs() {
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        assert!(matches!(
            map.build(&[1.0, 2.0], 0),
            Err(PolicyError::ActionOutOfRange { .. })
        ));
        assert!(matches!(
            map.build(&[1.0, 2.0], 3),
            Err(PolicyError::ActionOutOfRange { .. })
        ));
        assert!(matches!(
            map.build(&[1.0], 1),
            Err(PolicyError::ContextTooShort { .. })
        ));
        assert!(FeatureMap::new(0, vec![0]).is_err());
        assert!(FeatureMap::new(2, vec![]).is_err());
    }

    #[test]
    fn injected_draw_fixes_the_candidate() {
        let state = PosteriorState::new(4, 1.0).unwrap();
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        let features = map.build_all(&[1.0, 0.0]).unwrap();
        let draw = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let d = choose_action_centered_with(&state, &features, bounds(), &draw, &mut rng).unwrap();
        assert_eq!(d.candidate_action, 1);
        assert_eq!(d.candidate_features, features[0]);
        // Fresh posterior mean is zero, so the acting probability sits at 0.5.
        assert_eq!(d.pi, 0.5);
        assert!(d.realized_action == 0 || d.realized_action == 1);
    }

    #[test]
    fn single_action_is_always_the_candidate() {
        let state = PosteriorState::new(2, 1.0).unwrap();
        let map = FeatureMap::new(1, vec![0, 1]).unwrap();
        let features = map.build_all(&[0.4, -1.0]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..20 {
            let d = choose_action_centered(&state, &features, bounds(), &mut rng).unwrap();
            assert_eq!(d.candidate_action, 1);
        }
    }

    #[test]
    fn empty_action_set_is_rejected() {
        let state = PosteriorState::new(2, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        assert!(matches!(
            choose_action_centered(&state, &[], bounds(), &mut rng),
            Err(PolicyError::EmptyActionSet)
        ));
    }

    #[test]
    fn observe_round_trip_equals_direct_update() {
        let map = FeatureMap::new(2, vec![0, 1, 2, 3]).unwrap();
        let mut bandit = ActionCenteredBandit::new(map, bounds(), 1.0).unwrap();
        let ctx = [0.3, -0.7, 1.2, 0.1, 2.0, -1.0, 0.5];
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let decision = bandit.decide(&ctx, &mut rng).unwrap();

        let mut direct = bandit.posterior().clone();
        direct
            .update(
                &decision.candidate_features,
                decision.pi,
                decision.realized_action > 0,
                -0.4,
            )
            .unwrap();

        bandit.observe(&decision, -0.4).unwrap();
        assert_eq!(bandit.posterior().precision(), direct.precision());
        assert_eq!(bandit.posterior().response(), direct.response());
        assert_eq!(bandit.posterior().mean(), direct.mean());
    }

    #[test]
    fn benchmark_encoding_shapes() {
        let map = FeatureMap::new(2, vec![0, 1, 2, 3]).unwrap();
        let bandit = BenchmarkBandit::new(map, bounds(), 1.0).unwrap();
        let ctx = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let features = bandit.build_features(&ctx).unwrap();
        assert_eq!(features.len(), 3);
        assert_eq!(features[0].as_slice(), &[0.0; 10]);
        assert_eq!(
            features[1].as_slice(),
            &[1.0, 1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            features[2].as_slice(),
            &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 3.0, 4.0]
        );
    }

    #[test]
    fn benchmark_fresh_state_acts_at_one_half() {
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        let bandit = BenchmarkBandit::new(map, bounds(), 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let d = bandit.decide(&[0.5, -0.5], &mut rng).unwrap();
        assert_eq!(d.pi, 0.5);
    }

    #[test]
    fn benchmark_injected_draw_ranks_actions() {
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        let bandit = BenchmarkBandit::new(map, bounds(), 1.0).unwrap();
        let features = bandit.build_features(&[1.0, 1.0]).unwrap();
        // Weight only the second action's intercept.
        let draw = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let d =
            choose_benchmark_with(bandit.posterior(), &features, bounds(), &draw, &mut rng)
                .unwrap();
        assert_eq!(d.candidate_action, 2);
    }

    #[test]
    fn benchmark_zero_difference_falls_back_to_half() {
        // Identical candidate and zero-action features make the difference
        // vector vanish; the probability must sit at the symmetric 0.5.
        let state = PosteriorState::new(2, 1.0).unwrap();
        let same = FeatureVector::new(vec![1.0, 1.0]).unwrap();
        let features = vec![same.clone(), same];
        let draw = DVector::from_vec(vec![1.0, 0.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let d = choose_benchmark_with(&state, &features, bounds(), &draw, &mut rng).unwrap();
        assert_eq!(d.pi, 0.5);
    }

    #[test]
    fn realized_action_frequency_tracks_pi() {
        // Frozen state and context: pi is the same on every decision, so the
        // act rate over many draws must concentrate around it.
        let map = FeatureMap::new(2, vec![0, 1]).unwrap();
        let bandit = ActionCenteredBandit::new(map, bounds(), 1.0).unwrap();
        let ctx = [0.9, -0.4];
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let n = 100_000;
        let mut acted = 0usize;
        let mut pi = None;
        for _ in 0..n {
            let d = bandit.decide(&ctx, &mut rng).unwrap();
            match pi {
                None => pi = Some(d.pi),
                Some(p) => assert_eq!(p, d.pi),
            }
            if d.realized_action > 0 {
                acted += 1;
            }
        }
        let p = pi.unwrap();
        let fraction = acted as f64 / n as f64;
        let slack = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (fraction - p).abs() <= slack,
            "fraction {fraction} vs pi {p} (slack {slack})"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn emitted_probabilities_stay_in_bounds(
            seed in any::<u64>(),
            steps in 1usize..60,
        ) {
            let map = FeatureMap::new(2, vec![0, 1, 2]).unwrap();
            let mut bandit = ActionCenteredBandit::new(map, bounds(), 1.0).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for _ in 0..steps {
                let ctx: Vec<f64> = (0..3).map(|_| 4.0 * (rng.random::<f64>() - 0.5)).collect();
                let d = bandit.decide(&ctx, &mut rng).unwrap();
                prop_assert!(d.pi >= 0.2 && d.pi <= 0.8);
                prop_assert!(d.realized_action == 0 || d.realized_action == d.candidate_action);
                bandit.observe(&d, rng.random::<f64>() - 0.5).unwrap();
            }
        }

        #[test]
        fn candidate_is_invariant_to_positive_scaling(
            seed in any::<u64>(),
            log_scale in -3.0f64..3.0,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let state = PosteriorState::new(4, 1.0).unwrap();
            let map = FeatureMap::new(2, vec![0, 1]).unwrap();
            let ctx: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let features = map.build_all(&ctx).unwrap();
            let draw = DVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let scaled = &draw * 10f64.powf(log_scale);

            let mut r1 = ChaCha12Rng::seed_from_u64(0);
            let mut r2 = ChaCha12Rng::seed_from_u64(0);
            let a = choose_action_centered_with(&state, &features, bounds(), &draw, &mut r1)
                .unwrap();
            let b = choose_action_centered_with(&state, &features, bounds(), &scaled, &mut r2)
                .unwrap();
            prop_assert_eq!(a.candidate_action, b.candidate_action);
        }

        #[test]
        fn exact_ties_pick_the_lowest_action(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let state = PosteriorState::new(4, 1.0).unwrap();
            // Same block content for both actions; any draw that weights the
            // blocks identically scores them identically.
            let shared = rng.random::<f64>() * 2.0 - 1.0;
            let features = vec![
                FeatureVector::new(vec![shared, 0.0, 0.0, 0.0]).unwrap(),
                FeatureVector::new(vec![0.0, 0.0, shared, 0.0]).unwrap(),
            ];
            let w = rng.random::<f64>() * 2.0 - 1.0;
            let draw = DVector::from_vec(vec![w, 0.3, w, 0.3]);
            let d = choose_action_centered_with(&state, &features, bounds(), &draw, &mut rng)
                .unwrap();
            prop_assert_eq!(d.candidate_action, 1);
        }
    }
}
