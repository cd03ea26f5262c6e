//! Exponential forecaster over thresholds `x ∈ [0, N]` and `λ ∈ (0, 1]`.
//!
//! For a fixed `λ < 1` the bound along the `x` axis is `(b + x)/(1 − λ)` up to
//! the robust cap and before the season ends, so the multiplicative factors
//! form a geometric sequence and a round needs only a handful of exponentials
//! per `λ`.

use std::f64::consts::E;

use rand::Rng;

use crate::error::{Error, Result};
use crate::learners::RegretLedger;

use super::costs::SkiSeason;
use super::dispersion::{dispersion_check, DispersionReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousConfig {
    /// Threshold grid: `x_points` equally spaced values on `[0, N]`.
    pub x_points: usize,
    /// Trade-off grid: `k / lambda_points` for `k = 1..=lambda_points`.
    pub lambda_points: usize,
    pub step: Option<f64>,
    /// Constants of the bound `c₁ √(T ln(NT)) + c₂ (N + B)² T^{1−β}`.
    pub c1: f64,
    pub c2: f64,
    pub beta: f64,
    /// Dispersion gate constant `c` in `count ≤ c·εT·ln T`.
    pub dispersion_constant: f64,
}

impl Default for ContinuousConfig {
    fn default() -> Self {
        ContinuousConfig {
            x_points: 401,
            lambda_points: 200,
            step: None,
            c1: 1.0,
            c2: 1.0,
            beta: 0.5,
            dispersion_constant: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousRun {
    pub ledger: RegretLedger,
    /// Whether the season lengths met the dispersion precondition; the bound
    /// is only meaningful when they do.
    pub dispersion: DispersionReport,
}

struct Grid {
    xs: Vec<f64>,
    lambdas: Vec<f64>,
}

impl Grid {
    /// Bound of every `x` at `λ_j` for one season, written into `out`.
    fn fill_values(&self, j: usize, season: &SkiSeason, out: &mut [f64]) {
        let l = self.lambdas[j];
        let robust = E * season.optimum() / ((E - 1.0) * l);
        if l >= 1.0 {
            out.fill(robust);
            return;
        }
        let a = 1.0 / (1.0 - l);
        for (o, &x) in out.iter_mut().zip(&self.xs) {
            let u = if season.days <= x { season.days } else { season.buy + x };
            *o = (u * a).min(robust);
        }
    }

    /// `exp(−α·value)` along the `x` axis at `λ_j`, using the geometric
    /// structure of the uncapped prefix.
    fn fill_factors(&self, j: usize, season: &SkiSeason, step: f64, values: &[f64], out: &mut [f64]) {
        let l = self.lambdas[j];
        if l >= 1.0 {
            out.fill((-step * values[0]).exp());
            return;
        }
        let a = 1.0 / (1.0 - l);
        let dx = if self.xs.len() > 1 { self.xs[1] - self.xs[0] } else { 0.0 };
        let ratio = (-step * a * dx).exp();
        let mut running = (-step * a * season.buy).exp();
        let robust = E * season.optimum() / ((E - 1.0) * l);
        let capped = (-step * robust).exp();
        let served = (-step * (season.days * a).min(robust)).exp();
        for (i, (o, &x)) in out.iter_mut().zip(&self.xs).enumerate() {
            *o = if season.days <= x {
                served
            } else if values[i] >= robust {
                capped
            } else {
                running
            };
            running *= ratio;
        }
    }
}

/// Runs the forecaster with step `√(8 ln G / T) / (e(N + B))` (the loss
/// range), recording exact expected losses and sampled `(x, λ)`. The
/// comparator is the best grid point in hindsight.
pub fn continuous_forecaster<R: Rng + ?Sized>(
    seasons: &[SkiSeason],
    max_days: f64,
    max_buy: f64,
    config: ContinuousConfig,
    rng: &mut R,
) -> Result<ContinuousRun> {
    if config.x_points == 0 || config.lambda_points == 0 {
        return Err(Error::invalid("grid needs at least one point per axis"));
    }
    if let Some(s) = seasons.iter().find(|s| s.days > max_days || s.buy > max_buy) {
        return Err(Error::invalid(format!(
            "season (n = {}, b = {}) exceeds the caps N = {max_days}, B = {max_buy}",
            s.days, s.buy
        )));
    }
    let days: Vec<f64> = seasons.iter().map(|s| s.days).collect();
    let dispersion = dispersion_check(&days, config.beta, config.dispersion_constant)?;
    let t = seasons.len() as f64;
    let bound = config.c1 * (t * (max_days * t).max(1.0).ln()).sqrt()
        + config.c2 * (max_days + max_buy).powi(2) * t.powf(1.0 - config.beta);
    let mut ledger = RegretLedger::new(bound);
    if seasons.is_empty() {
        return Ok(ContinuousRun { ledger, dispersion });
    }
    let nx = config.x_points;
    let grid = Grid {
        xs: (0..nx)
            .map(|i| if nx == 1 { 0.0 } else { max_days * i as f64 / (nx - 1) as f64 })
            .collect(),
        lambdas: (1..=config.lambda_points)
            .map(|k| k as f64 / config.lambda_points as f64)
            .collect(),
    };
    let cells = nx * grid.lambdas.len();
    let step = config
        .step
        .unwrap_or((8.0 * (cells as f64).ln() / t).sqrt() / (E * (max_days + max_buy)));

    // λ-major: weights[j * nx + i]
    let mut weights = vec![1.0 / cells as f64; cells];
    let mut cumulative = vec![0.0; cells];
    let mut values = vec![0.0; nx];
    let mut factors = vec![0.0; nx];
    for season in seasons {
        let mut expected = 0.0;
        let mut next_total = 0.0;
        let mut total = 0.0;
        let pick_target = rng.random::<f64>();
        let mut row_sums = Vec::with_capacity(grid.lambdas.len());
        for j in 0..grid.lambdas.len() {
            grid.fill_values(j, season, &mut values);
            grid.fill_factors(j, season, step, &values, &mut factors);
            let row = &mut weights[j * nx..(j + 1) * nx];
            let cum = &mut cumulative[j * nx..(j + 1) * nx];
            let mut row_sum = 0.0;
            for i in 0..nx {
                expected += row[i] * values[i];
                row_sum += row[i];
                cum[i] += values[i];
                row[i] *= factors[i];
                next_total += row[i];
            }
            total += row_sum;
            row_sums.push(row_sum);
        }
        // sampling uses the pre-update weights, recovered row by row
        let action = sample_pre_update(&grid, &weights, &row_sums, total * pick_target, season, step, &mut values, &mut factors);
        ledger.push(expected / total, action);
        weights.iter_mut().for_each(|w| *w /= next_total);
    }
    let best = cumulative
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < cumulative[b] { i } else { b });
    let (j, i) = (best / nx, best % nx);
    let per_round = seasons
        .iter()
        .map(|s| {
            grid.fill_values(j, s, &mut values);
            values[i]
        })
        .collect::<Vec<_>>();
    ledger.set_comparator(&per_round);
    Ok(ContinuousRun { ledger, dispersion })
}

/// Picks the pre-update cell whose cumulative weight first exceeds `target`.
/// Rows are located from their stored sums; within the chosen row the update
/// factors are divided back out.
#[allow(clippy::too_many_arguments)]
fn sample_pre_update(
    grid: &Grid,
    weights: &[f64],
    row_sums: &[f64],
    target: f64,
    season: &SkiSeason,
    step: f64,
    values: &mut [f64],
    factors: &mut [f64],
) -> Vec<f64> {
    let nx = grid.xs.len();
    let mut acc = 0.0;
    let mut j = row_sums.len() - 1;
    for (r, s) in row_sums.iter().enumerate() {
        if target < acc + s {
            j = r;
            break;
        }
        acc += s;
    }
    grid.fill_values(j, season, values);
    grid.fill_factors(j, season, step, values, factors);
    let row = &weights[j * nx..(j + 1) * nx];
    let mut i = nx - 1;
    for (c, (w, f)) in row.iter().zip(factors.iter()).enumerate() {
        acc += w / f;
        if target < acc {
            i = c;
            break;
        }
    }
    vec![grid.xs[i], grid.lambdas[j]]
}
