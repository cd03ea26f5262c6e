//! Online learning of fixed dual predictions from solved instances.

use crate::error::{Error, Result};
use crate::learners::lp::{minimize_sum_of_max_affine, AffinePiece, MaxAffine, Polytope};
use crate::learners::subgradient::{l1_distance, linf_distance};
use crate::learners::{best_in_hindsight_l1, l1_subgradient, linf_subgradient, ogd_step, BoxDomain, RegretLedger};

fn check_targets(targets: &[Vec<f64>], dim: usize) -> Result<()> {
    if targets.iter().any(|t| t.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: targets.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
        });
    }
    Ok(())
}

/// Projected OGD from the origin on `‖x − x*_t‖_{b_t,1}` over `[−C, C]^n`.
///
/// `targets[t]` is the optimal dual of round `t`; `weights[t]` the demand
/// vector for the b-matching loss (unit weights when `None`). The default step
/// is `C / (B √(2T))` with `B = max demand` (1 for plain matching) and the
/// recorded bound is `C B n √(2T)`.
pub fn ogd_dual_learner(
    targets: &[Vec<f64>],
    weights: Option<&[Vec<f64>]>,
    radius: f64,
    step_override: Option<f64>,
) -> Result<RegretLedger> {
    let n = targets.first().map_or(0, Vec::len);
    check_targets(targets, n)?;
    let t = targets.len() as f64;
    let b_max = weights.map_or(1.0, |w| {
        w.iter().flatten().copied().fold(0.0, f64::max).max(1.0)
    });
    let domain = BoxDomain::symmetric(n, radius)?;
    let bound = radius * b_max * n as f64 * (2.0 * t).sqrt();
    let mut ledger = RegretLedger::new(bound);
    if targets.is_empty() {
        return Ok(ledger);
    }
    let step = step_override.unwrap_or(radius / (b_max * (2.0 * t).sqrt()));
    let mut x = vec![0.0; n];
    for (i, target) in targets.iter().enumerate() {
        let w = weights.map(|w| w[i].as_slice());
        ledger.push(l1_distance(&x, target, w), x.clone());
        let g = l1_subgradient(&x, target, w)?;
        if step > 0.0 {
            x = ogd_step(&x, &g, step, &domain)?;
        }
    }
    let (best, _) = best_in_hindsight_l1(targets, weights, &domain)?;
    let per_round: Vec<f64> = targets
        .iter()
        .enumerate()
        .map(|(i, tg)| l1_distance(&best, tg, weights.map(|w| w[i].as_slice())))
        .collect();
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

/// Projected OGD on `‖x − x*_t‖_∞` over `[−M, M]^d` with step `M √(d/(2T))`
/// and bound `M √(2dT)`. The comparator is solved exactly as a linear program.
pub fn linf_dual_learner(targets: &[Vec<f64>], radius: f64) -> Result<RegretLedger> {
    let d = targets.first().map_or(0, Vec::len);
    check_targets(targets, d)?;
    let t = targets.len() as f64;
    let mut ledger = RegretLedger::new(radius * (2.0 * d as f64 * t).sqrt());
    if targets.is_empty() {
        return Ok(ledger);
    }
    let domain = BoxDomain::symmetric(d, radius)?;
    let step = radius * (d as f64 / (2.0 * t)).sqrt();
    let mut x = vec![0.0; d];
    for target in targets {
        ledger.push(linf_distance(&x, target), x.clone());
        let g = linf_subgradient(&x, target)?;
        if step > 0.0 {
            x = ogd_step(&x, &g, step, &domain)?;
        }
    }
    let losses: Vec<MaxAffine> = targets
        .iter()
        .map(|target| {
            target
                .iter()
                .enumerate()
                .flat_map(|(i, &y)| {
                    [
                        AffinePiece { terms: vec![(i, 1.0)], constant: -y },
                        AffinePiece { terms: vec![(i, -1.0)], constant: y },
                    ]
                })
                .collect()
        })
        .collect();
    let region = Polytope {
        bounds: vec![(-radius, radius); d],
        unit_sum_groups: vec![],
    };
    let (best, _) = minimize_sum_of_max_affine(&region, &losses)?;
    let per_round: Vec<f64> = targets.iter().map(|tg| linf_distance(&best, tg)).collect();
    ledger.set_comparator(&per_round);
    Ok(ledger)
}
