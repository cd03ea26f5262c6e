use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::learners::ktoco::ktoco_regret_bound;
use crate::learners::lp::{minimize_sum_of_max_affine_aggregated, AffinePiece, MaxAffine, Polytope};
use crate::learners::subgradient::linf_distance;
use crate::learners::{ktoco_step, linf_subgradient, ogd_step, BoxDomain, CoinBettingState, RegretLedger};
use crate::matrix::Matrix;

fn log_weights(w: &[f64]) -> Result<Vec<f64>> {
    if w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("machine weights must be positive and finite"));
    }
    Ok(w.iter().map(|v| v.ln()).collect())
}

/// `‖x − log w‖_∞`.
pub fn logit_loss(x: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(w.len(), x.len())?;
    Ok(linf_distance(x, &log_weights(w)?))
}

/// `min{‖x − log w‖_∞, ln m}`, the quantity the competitive ratio depends on.
pub fn truncated_logit_loss(x: &[f64], w: &[f64]) -> Result<f64> {
    Ok(logit_loss(x, w)?.min((w.len() as f64).ln()))
}

/// Feedback of one round: the good weights and the instance features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitRound {
    pub weights: Vec<f64>,
    pub features: Vec<f64>,
}

impl LogitRound {
    fn target(&self) -> Result<Vec<f64>> {
        log_weights(&self.weights)
    }
}

fn check_rounds(rounds: &[LogitRound], m: usize, f: usize) -> Result<()> {
    for r in rounds {
        check_dim(m, r.weights.len())?;
        check_dim(f, r.features.len())?;
    }
    Ok(())
}

/// Loss of the map `a` on one round and its subgradient `g fᵀ`.
fn map_loss(a: &Matrix, round: &LogitRound) -> Result<(f64, Matrix)> {
    let x = a.mul_vec(&round.features)?;
    let y = round.target()?;
    let g = linf_subgradient(&x, &y)?;
    Ok((linf_distance(&x, &y), Matrix::outer(&g, &round.features)))
}

/// Random `m × f` map with Frobenius norm `norm` and every entry at most
/// `cap` in magnitude (rejection sampling over Gaussian directions).
pub fn planted_logit_map<R: Rng + ?Sized>(m: usize, f: usize, norm: f64, cap: f64, rng: &mut R) -> Result<Matrix> {
    if norm > cap * ((m * f) as f64).sqrt() {
        return Err(Error::invalid("no map has that Frobenius norm under the entry cap"));
    }
    for _ in 0..10_000 {
        let data: Vec<f64> = (0..m * f).map(|_| StandardNormal.sample(rng)).collect();
        let mut a = Matrix::from_flat(m, f, data)?;
        let fro = a.frobenius_norm();
        if fro == 0.0 {
            continue;
        }
        a.scale(norm / fro);
        if a.max_abs() <= cap {
            return Ok(a);
        }
    }
    Err(Error::invalid("rejection sampling for the planted map did not terminate"))
}

/// KT-OCO over unconstrained `m × f` maps, reported against the designated
/// comparator `reference` with bound `‖A°‖_F √(T ln(1 + 24 T² ‖A°‖_F²)) + 1`.
pub fn ktoco_logit_learner(rounds: &[LogitRound], reference: &Matrix) -> Result<RegretLedger> {
    let (m, f) = (reference.rows(), reference.cols());
    check_rounds(rounds, m, f)?;
    let mut ledger = RegretLedger::new(ktoco_regret_bound(reference.frobenius_norm(), rounds.len()));
    let mut state = CoinBettingState::new(m * f);
    let mut a = Matrix::zeros(m, f);
    let mut reference_losses = Vec::with_capacity(rounds.len());
    for round in rounds {
        let (loss, g) = map_loss(&a, round)?;
        ledger.push(loss, a.as_slice().to_vec());
        reference_losses.push(map_loss(reference, round)?.0);
        let (next, point) = ktoco_step(&state, g.as_slice())?;
        state = next;
        a = Matrix::from_flat(m, f, point)?;
    }
    ledger.set_comparator(&reference_losses);
    Ok(ledger)
}

/// Projected OGD over `‖A‖_max ≤ B` with step `B √(m f / (2T))` and bound
/// `B √(2 m f T)`. The comparator is the exact best map in the box.
pub fn ogd_bounded_matrix_learner(
    rounds: &[LogitRound],
    m: usize,
    f: usize,
    cap: f64,
    step_override: Option<f64>,
) -> Result<RegretLedger> {
    check_rounds(rounds, m, f)?;
    let t = rounds.len() as f64;
    let dim = (m * f) as f64;
    let mut ledger = RegretLedger::new(cap * (2.0 * dim * t).sqrt());
    if rounds.is_empty() {
        return Ok(ledger);
    }
    let domain = BoxDomain::symmetric(m * f, cap)?;
    let step = step_override.unwrap_or(cap * (dim / (2.0 * t)).sqrt());
    let mut a = Matrix::zeros(m, f);
    for round in rounds {
        let (loss, g) = map_loss(&a, round)?;
        ledger.push(loss, a.as_slice().to_vec());
        if step > 0.0 {
            a = Matrix::from_flat(m, f, ogd_step(a.as_slice(), g.as_slice(), step, &domain)?)?;
        }
    }
    let best = best_bounded_logit_map(rounds, m, f, cap)?;
    let per_round = rounds
        .iter()
        .map(|r| map_loss(&best, r).map(|(l, _)| l))
        .collect::<Result<Vec<_>>>()?;
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

/// Exact best map in `‖A‖_max ≤ B` for the summed logit losses, solved as a
/// linear program.
pub fn best_bounded_logit_map(rounds: &[LogitRound], m: usize, f: usize, cap: f64) -> Result<Matrix> {
    check_rounds(rounds, m, f)?;
    if rounds.is_empty() {
        return Ok(Matrix::zeros(m, f));
    }
    let losses = rounds
        .iter()
        .map(|r| {
            let y = r.target()?;
            Ok(y.iter()
                .enumerate()
                .flat_map(|(i, &yi)| {
                    let terms: Vec<(usize, f64)> = r.features.iter().enumerate().map(|(k, &fk)| (i * f + k, fk)).collect();
                    let neg = terms.iter().map(|&(v, c)| (v, -c)).collect();
                    [
                        AffinePiece { terms, constant: -yi },
                        AffinePiece { terms: neg, constant: yi },
                    ]
                })
                .collect::<MaxAffine>())
        })
        .collect::<Result<Vec<_>>>()?;
    let region = Polytope {
        bounds: vec![(-cap, cap); m * f],
        unit_sum_groups: vec![],
    };
    let (best, _) = minimize_sum_of_max_affine_aggregated(&region, &losses)?;
    Matrix::from_flat(m, f, best)
}
