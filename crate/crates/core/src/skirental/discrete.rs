//! Exponentiated gradient over thresholds `x ∈ {1..N}` times `λ ∈ Λ`.
//!
//! A season's bound takes only two values per `λ` (one for `x ≤ b`, one for
//! `x > b`), so a round costs two exponentials per `λ` and one multiply per
//! expert. Weights are kept in linear scale and renormalized every round.

use rand::Rng;

use crate::error::{Error, Result};
use crate::learners::RegretLedger;

use super::costs::SkiSeason;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiscreteConfig {
    /// Grid spacing override; `1/δ` is rounded up to an integer.
    pub delta: Option<f64>,
    pub step: Option<f64>,
}

/// `min{N (e^{1/N} − 1)² / (B e^{1/N}) · √(2/T), 1}`.
pub fn discrete_delta(max_days: u32, max_buy: f64, rounds: usize) -> f64 {
    let n = f64::from(max_days);
    let g = (1.0 / n).exp();
    (n * (g - 1.0).powi(2) / (max_buy * g) * (2.0 / rounds.max(1) as f64).sqrt()).min(1.0)
}

/// Bound values for `x ≤ b` and `x > b` at trade-off `λ`.
fn two_values(season: &SkiSeason, lambda: f64, log_growth: f64) -> (f64, f64) {
    let den = -(-season.buy * lambda * log_growth).exp_m1();
    let opt = season.optimum();
    (
        (lambda * season.days).min(opt) / den,
        (lambda * season.buy).min(opt) / den,
    )
}

fn check_seasons(seasons: &[SkiSeason], max_days: u32, max_buy: f64) -> Result<()> {
    for s in seasons {
        if s.days > f64::from(max_days) || s.buy > max_buy {
            return Err(Error::invalid(format!(
                "season (n = {}, b = {}) exceeds the caps N = {max_days}, B = {max_buy}",
                s.days, s.buy
            )));
        }
    }
    Ok(())
}

/// Runs EG over `{1..N} × {k/K}` with `K = ⌈1/δ⌉` and step
/// `(1/(2N)) √(ln(N/δ)/(2T))`. Rows hold the exact expected loss under the
/// current weights and the sampled `(x, λ)`. The comparator is
/// [`discrete_comparator`]; the bound is `6N √(T ln(BNT))`.
pub fn discrete_grid_learner<R: Rng + ?Sized>(
    seasons: &[SkiSeason],
    max_days: u32,
    max_buy: f64,
    config: DiscreteConfig,
    rng: &mut R,
) -> Result<RegretLedger> {
    if max_days < 2 {
        return Err(Error::invalid("need N ≥ 2"));
    }
    check_seasons(seasons, max_days, max_buy)?;
    let t = seasons.len();
    let n = f64::from(max_days);
    let tf = t as f64;
    let bound = 6.0 * n * (tf * (max_buy * n * tf).max(1.0).ln()).sqrt();
    let mut ledger = RegretLedger::new(bound);
    if t == 0 {
        return Ok(ledger);
    }
    let raw = config.delta.unwrap_or_else(|| discrete_delta(max_days, max_buy, t));
    if !(raw > 0.0 && raw <= 1.0) {
        return Err(Error::invalid("grid spacing must lie in (0, 1]"));
    }
    let k = (1.0 / raw).ceil() as usize;
    let delta = 1.0 / k as f64;
    let lambdas: Vec<f64> = (1..=k).map(|i| i as f64 * delta).collect();
    let step = config
        .step
        .unwrap_or((1.0 / (2.0 * n)) * ((n / delta).ln() / (2.0 * tf)).sqrt());

    let xs = max_days as usize;
    // x-major: weights[(x − 1) * k + j]
    let mut weights = vec![1.0 / (xs * k) as f64; xs * k];
    let mut low = vec![0.0; k];
    let mut high = vec![0.0; k];
    let mut f_low = vec![0.0; k];
    let mut f_high = vec![0.0; k];
    for season in seasons {
        let log_growth = (1.0 / season.buy).ln_1p();
        for (j, &l) in lambdas.iter().enumerate() {
            let (a, b) = two_values(season, l, log_growth);
            low[j] = a;
            high[j] = b;
            f_low[j] = (-step * a).exp();
            f_high[j] = (-step * b).exp();
        }
        let mut expected = 0.0;
        let mut total = 0.0;
        for x in 1..=xs {
            let row = &weights[(x - 1) * k..x * k];
            let values = if x as f64 <= season.buy { &low } else { &high };
            for (w, u) in row.iter().zip(values) {
                expected += w * u;
                total += w;
            }
        }
        let pick = sample(&weights, total, rng);
        let (x, j) = (pick / k + 1, pick % k);
        ledger.push(expected / total, vec![x as f64, lambdas[j]]);

        let mut next_total = 0.0;
        for x in 1..=xs {
            let row = &mut weights[(x - 1) * k..x * k];
            let factors = if x as f64 <= season.buy { &f_low } else { &f_high };
            for (w, f) in row.iter_mut().zip(factors) {
                *w *= f;
                next_total += *w;
            }
        }
        weights.iter_mut().for_each(|w| *w /= next_total);
    }
    let (_, _, per_round) = discrete_comparator(seasons, max_days, &lambdas)?;
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

fn sample<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

/// Best `(x, λ)` over `x ∈ {1..N}` and a reference set of `λ` values: the
/// learner's own grid (`extra`), every multiple of `1/20000`, and `λ = 10⁻¹²`
/// standing in for the limit at zero. Returns `(x, λ, per-round losses)`.
///
/// Seasons sharing a buy price share the `x ≤ b` split, so the cumulative
/// bound of every threshold follows from per-price sums.
pub fn discrete_comparator(seasons: &[SkiSeason], max_days: u32, extra: &[f64]) -> Result<(u32, f64, Vec<f64>)> {
    if seasons.is_empty() {
        return Err(Error::invalid("comparator needs at least one season"));
    }
    let mut reference: Vec<f64> = (1..=20_000).map(|i| i as f64 / 20_000.0).collect();
    reference.push(1e-12);
    reference.extend_from_slice(extra);

    let mut prices: Vec<f64> = seasons.iter().map(|s| s.buy).collect();
    prices.sort_by(f64::total_cmp);
    prices.dedup();
    let group: Vec<usize> = seasons
        .iter()
        .map(|s| prices.partition_point(|&p| p < s.buy))
        .collect();
    let logs: Vec<f64> = prices.iter().map(|b| (1.0 / b).ln_1p()).collect();

    let mut best = (1u32, reference[0], f64::INFINITY);
    let mut low_sum = vec![0.0; prices.len()];
    let mut high_sum = vec![0.0; prices.len()];
    for &l in &reference {
        low_sum.fill(0.0);
        high_sum.fill(0.0);
        for (s, &g) in seasons.iter().zip(&group) {
            let (a, b) = two_values(s, l, logs[g]);
            low_sum[g] += a;
            high_sum[g] += b;
        }
        for x in 1..=max_days {
            let total: f64 = prices
                .iter()
                .enumerate()
                .map(|(g, &p)| if f64::from(x) <= p { low_sum[g] } else { high_sum[g] })
                .sum();
            if total < best.2 {
                best = (x, l, total);
            }
        }
    }
    let (x, l, _) = best;
    let per_round = seasons
        .iter()
        .map(|s| {
            let (a, b) = two_values(s, l, (1.0 / s.buy).ln_1p());
            if f64::from(x) <= s.buy { a } else { b }
        })
        .collect();
    Ok((x, l, per_round))
}
