use rand::Rng;

use crate::error::{Error, Result};
use crate::learners::{forecaster_update, GridDensity, RegretLedger};

/// Competitive-ratio bound extended to the closed interval by its limits:
/// `1 + 2η/n` at `λ = 0` and `2` at `λ = 1`.
pub fn ratio_bound_closed(lambda: f64, avg_error: f64) -> f64 {
    let robust = 1.0 + 2.0 * avg_error;
    if lambda <= 0.0 {
        robust
    } else if lambda >= 1.0 {
        2.0
    } else {
        (robust / (1.0 - lambda)).min(2.0 / lambda)
    }
}

/// Exact minimizer over `λ ∈ [0, 1]` of `Σ_t min{a_t/(1 − λ), 2/λ}` with
/// `a_t = 1 + 2η_t/n_t`. Round `t` uses its first branch iff
/// `λ ≤ 2/(2 + a_t)`, so between consecutive breakpoints the objective is
/// `A/(1 − λ) + C/λ`, minimized in closed form at `√C/(√A + √C)`.
pub fn best_fixed_lambda(avg_errors: &[f64]) -> (f64, f64) {
    if avg_errors.is_empty() {
        return (0.0, 0.0);
    }
    let mut rounds: Vec<(f64, f64)> = avg_errors
        .iter()
        .map(|r| {
            let a = 1.0 + 2.0 * r;
            (2.0 / (2.0 + a), a)
        })
        .collect();
    rounds.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total = |lambda: f64| avg_errors.iter().map(|&r| ratio_bound_closed(lambda, r)).sum::<f64>();

    let mut candidates = vec![0.0, 1.0];
    candidates.extend(rounds.iter().map(|r| r.0));
    // rounds[..i] have breakpoints below λ and use the 2/λ branch
    let mut a_suffix: f64 = rounds.iter().map(|r| r.1).sum();
    let mut lo = 0.0;
    for i in 0..=rounds.len() {
        let hi = rounds.get(i).map_or(1.0, |r| r.0);
        let c = 2.0 * i as f64;
        if a_suffix > 0.0 && c > 0.0 {
            let s = c.sqrt() / (a_suffix.sqrt() + c.sqrt());
            if s > lo && s < hi {
                candidates.push(s);
            }
        }
        if let Some(r) = rounds.get(i) {
            a_suffix -= r.1;
        }
        lo = hi;
    }
    candidates
        .into_iter()
        .map(|l| (l, total(l)))
        .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Exponential forecaster over `grid_points` equally spaced values of `λ`
/// inside `(0, 1)` on the bounds `U_t(λ)` of a stream of average errors
/// `η_t/n_t ≤ B`.
///
/// The default step `√(8 ln G / T) / M` uses the loss range `M = 3(1 + 2B)`.
/// Each ledger row records the expected loss under the current density and the
/// sampled `λ`; the comparator is the exact best `λ` on `[0, 1]`, and the
/// bound is `9B(1 + √((T/2) ln T))`.
pub fn lambda_forecaster<R: Rng + ?Sized>(
    avg_errors: &[f64],
    cap: f64,
    grid_points: usize,
    step_override: Option<f64>,
    rng: &mut R,
) -> Result<RegretLedger> {
    if let Some(r) = avg_errors.iter().find(|&&r| !(0.0..=cap + 1e-12).contains(&r)) {
        return Err(Error::invalid(format!("average error {r} outside [0, {cap}]")));
    }
    let t = avg_errors.len() as f64;
    let bound = 9.0 * cap * (1.0 + (0.5 * t * t.max(1.0).ln()).sqrt());
    let mut ledger = RegretLedger::new(bound);
    if avg_errors.is_empty() {
        return Ok(ledger);
    }
    let half = 0.5 / grid_points as f64;
    let mut density = GridDensity::uniform_1d(half, 1.0 - half, grid_points)?;
    let range = 3.0 * (1.0 + 2.0 * cap);
    let step = step_override.unwrap_or((8.0 * (grid_points as f64).ln() / t).sqrt() / range);
    for &r in avg_errors {
        let loss = density.expectation(|p| ratio_bound_closed(p[0], r));
        let lambda = density.point(density.sample_index(rng)?)[0];
        ledger.push(loss, vec![lambda]);
        density = forecaster_update(&density, |p| ratio_bound_closed(p[0], r), step)?;
    }
    let (best, _) = best_fixed_lambda(avg_errors);
    let per_round: Vec<f64> = avg_errors.iter().map(|&r| ratio_bound_closed(best, r)).collect();
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::regret_report;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn best_lambda_matches_fine_grid() {
        let errors = [0.0, 0.3, 1.0, 0.8, 0.05, 0.0, 0.6];
        let (_, exact) = best_fixed_lambda(&errors);
        let grid = (0..=200_000)
            .map(|k| {
                let l = k as f64 / 200_000.0;
                errors.iter().map(|&r| ratio_bound_closed(l, r)).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(exact <= grid + 1e-12);
        assert!(grid - exact < 1e-6);
    }

    #[test]
    fn perfect_stream_prefers_small_lambda() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let errors = vec![0.0; 2000];
        let ledger = lambda_forecaster(&errors, 1.0, 512, None, &mut rng).unwrap();
        assert!(regret_report(&ledger).satisfied);
        assert_eq!(best_fixed_lambda(&errors).1, 2000.0);
        let late: f64 = ledger.rounds[1900..].iter().map(|r| r.action[0]).sum::<f64>() / 100.0;
        assert!(late < 0.1, "{late}");
    }

    #[test]
    fn single_round() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let ledger = lambda_forecaster(&[0.5], 1.0, 512, None, &mut rng).unwrap();
        assert!(regret_report(&ledger).satisfied);
    }
}
