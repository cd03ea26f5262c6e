//! Exponentially weighted forecaster over a uniform grid.
//!
//! Continuous action sets are discretized to a uniform grid per axis; the
//! density `ρ_{t+1} ∝ ρ_1 · exp(−α Σ_s U_s)` is stored as log-weights and only
//! normalized when probabilities are needed.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    /// Number of coordinates per point (1 or 2).
    dim: usize,
    /// Row-major flattened points, `len = dim * log_weights.len()`.
    points: Vec<f64>,
    log_weights: Vec<f64>,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| lo + step * i as f64).collect()
        }
    }
}

impl GridDensity {
    /// `count` equally spaced points on `[lo, hi]` (inclusive), uniform prior.
    pub fn uniform_1d(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 || !(lo <= hi) {
            return Err(Error::invalid("grid needs a nonempty interval and count"));
        }
        let points = linspace(lo, hi, count);
        Ok(GridDensity {
            dim: 1,
            log_weights: vec![0.0; points.len()],
            points,
        })
    }

    /// Product grid with `nx × ny` points, the second axis varying fastest.
    pub fn uniform_2d(x: (f64, f64, usize), y: (f64, f64, usize)) -> Result<Self> {
        if x.2 == 0 || y.2 == 0 || !(x.0 <= x.1) || !(y.0 <= y.1) {
            return Err(Error::invalid("grid needs nonempty intervals and counts"));
        }
        let xs = linspace(x.0, x.1, x.2);
        let ys = linspace(y.0, y.1, y.2);
        let mut points = Vec::with_capacity(2 * xs.len() * ys.len());
        for xv in &xs {
            for yv in &ys {
                points.push(*xv);
                points.push(*yv);
            }
        }
        Ok(GridDensity {
            dim: 2,
            log_weights: vec![0.0; xs.len() * ys.len()],
            points,
        })
    }

    /// Replaces the log-weights (e.g. a nonuniform prior).
    pub fn with_log_weights(mut self, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() != self.log_weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.log_weights.len(),
                got: log_weights.len(),
            });
        }
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::invalid("log-weights must be < +inf and not NaN"));
        }
        self.log_weights = log_weights;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index * self.dim..(index + 1) * self.dim]
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalized probabilities (log-sum-exp stabilized).
    pub fn probabilities(&self) -> Vec<f64> {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = self.log_weights.iter().map(|w| (w - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        probs
    }

    /// Expected value of `f` under the normalized density.
    pub fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.probabilities()
            .iter()
            .enumerate()
            .map(|(i, p)| if *p > 0.0 { p * f(self.point(i)) } else { 0.0 })
            .sum()
    }

    /// Draws a grid index with probability proportional to `exp(log_weight)`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::invalid("cannot sample from an empty grid"));
        }
        let probs = self.probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
        // u landed in the rounding slack above the last cumulative sum
        Ok(probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1))
    }
}

/// Decrements every log-weight by `step_size · loss_at(point)`.
pub fn forecaster_update(
    density: &GridDensity,
    loss_at: impl Fn(&[f64]) -> f64,
    step_size: f64,
) -> Result<GridDensity> {
    if !(step_size >= 0.0) {
        return Err(Error::invalid("step size must be nonnegative"));
    }
    let mut next = density.clone();
    for i in 0..next.len() {
        let loss = loss_at(density.point(i));
        if !loss.is_finite() {
            return Err(Error::invalid("forecaster loss must be finite"));
        }
        next.log_weights[i] -= step_size * loss;
    }
    Ok(next)
}

/// Samples a grid point by inverse-CDF sampling.
pub fn forecaster_sample<R: Rng + ?Sized>(density: &GridDensity, rng: &mut R) -> Result<Vec<f64>> {
    let index = density.sample_index(rng)?;
    Ok(density.point(index).to_vec())
}
