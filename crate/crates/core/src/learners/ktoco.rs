//! Parameter-free coin betting in Euclidean space (KT-OCO).
//!
//! The learner bets a fraction of its wealth in the direction of the summed
//! rewards, where the reward of a round is the negated subgradient:
//!
//! `x_{t+1} = (ε + Σ_{s≤t} ⟨r_s, x_s⟩) / (t + 1) · Σ_{s≤t} r_s`, `r_s = −g_s`.
//!
//! Regret against any comparator `u` is at most
//! `‖u‖ √(T log(1 + 24 T² ‖u‖²)) + ε` when every `‖g_t‖₂ ≤ 1`; keeping the
//! subgradients inside the unit ball is the caller's job.

use crate::error::{check_dim, check_finite, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoinBettingState {
    /// Initial wealth ε.
    pub wealth_origin: f64,
    pub reward_sum: Vec<f64>,
    /// Running `Σ ⟨r_s, x_s⟩`.
    pub inner_sum: f64,
    pub round: u64,
}

impl CoinBettingState {
    pub fn new(dim: usize) -> Self {
        Self::with_wealth(dim, 1.0)
    }

    pub fn with_wealth(dim: usize, wealth_origin: f64) -> Self {
        CoinBettingState {
            wealth_origin,
            reward_sum: vec![0.0; dim],
            inner_sum: 0.0,
            round: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.reward_sum.len()
    }

    /// Current wealth `ε + Σ ⟨r_s, x_s⟩`.
    pub fn wealth(&self) -> f64 {
        self.wealth_origin + self.inner_sum
    }

    /// The point played in the next round.
    pub fn point(&self) -> Vec<f64> {
        let scale = self.wealth() / (self.round as f64 + 1.0);
        self.reward_sum.iter().map(|r| scale * r).collect()
    }
}

/// Consumes the subgradient observed at the current point and returns the
/// updated state together with the next point.
pub fn ktoco_step(
    state: &CoinBettingState,
    subgrad: &[f64],
) -> Result<(CoinBettingState, Vec<f64>)> {
    check_dim(state.dim(), subgrad.len())?;
    check_finite(subgrad, "subgradient")?;
    let played = state.point();
    let mut next = state.clone();
    let gain: f64 = played.iter().zip(subgrad).map(|(x, g)| -g * x).sum();
    next.inner_sum += gain;
    next.reward_sum
        .iter_mut()
        .zip(subgrad)
        .for_each(|(r, g)| *r -= g);
    next.round += 1;
    let point = next.point();
    Ok((next, point))
}

/// Closed-form regret bound against a comparator of Euclidean norm `norm`
/// after `rounds` rounds with unit initial wealth.
pub fn ktoco_regret_bound(norm: f64, rounds: usize) -> f64 {
    let t = rounds as f64;
    norm * (t * (1.0 + 24.0 * t * t * norm * norm).ln()).sqrt() + 1.0
}
