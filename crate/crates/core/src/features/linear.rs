use crate::error::{check_dim, Error, Result};
use crate::learners::lp::{minimize_sum_of_max_affine, AffinePiece, MaxAffine, Polytope};
use crate::learners::subgradient::l1_distance;
use crate::learners::{best_in_hindsight_l1, l1_subgradient, ogd_step, BoxDomain, RegretLedger, SimplexPoint};
use crate::matrix::Matrix;

/// `A·f`.
pub fn predict_duals(a: &Matrix, features: &SimplexPoint) -> Result<Vec<f64>> {
    a.mul_vec(features.weights())
}

/// One solved instance seen by [`feature_ogd_learner`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRound {
    /// Optimal duals of the instance.
    pub target: Vec<f64>,
    /// Demand vector for b-matching losses; unit weights when `None`.
    pub demand: Option<Vec<f64>>,
    pub features: SimplexPoint,
}

/// Projected OGD over `n × f` matrices with `‖A‖_max ≤ C` on the losses
/// `‖A f_t − x*_t‖_{b_t,1}`, starting at zero.
///
/// Step `C / (B √(2T))`, bound `C B n f √(2T)`. With one-dimensional features
/// this performs exactly the arithmetic of
/// [`ogd_dual_learner`](crate::matching::ogd_dual_learner).
pub fn feature_ogd_learner(rounds: &[FeatureRound], radius: f64, step_override: Option<f64>) -> Result<RegretLedger> {
    let n = rounds.first().map_or(0, |r| r.target.len());
    let f = rounds.first().map_or(1, |r| r.features.dim());
    for r in rounds {
        check_dim(n, r.target.len())?;
        check_dim(f, r.features.dim())?;
        if let Some(d) = &r.demand {
            check_dim(n, d.len())?;
        }
    }
    let t = rounds.len() as f64;
    let b_max = rounds
        .iter()
        .filter_map(|r| r.demand.as_ref())
        .flatten()
        .copied()
        .fold(0.0, f64::max)
        .max(1.0);
    let domain = BoxDomain::symmetric(n * f, radius)?;
    let mut ledger = RegretLedger::new(radius * b_max * (n * f) as f64 * (2.0 * t).sqrt());
    if rounds.is_empty() {
        return Ok(ledger);
    }
    let step = step_override.unwrap_or(radius / (b_max * (2.0 * t).sqrt()));
    let mut a = Matrix::zeros(n, f);
    for r in rounds {
        let w = r.demand.as_deref();
        let pred = predict_duals(&a, &r.features)?;
        ledger.push(l1_distance(&pred, &r.target, w), a.as_slice().to_vec());
        let g = l1_subgradient(&pred, &r.target, w)?;
        if step > 0.0 {
            let grad = Matrix::outer(&g, r.features.weights());
            let next = ogd_step(a.as_slice(), grad.as_slice(), step, &domain)?;
            a = Matrix::from_flat(n, f, next)?;
        }
    }
    let best = feature_comparator(rounds, n, f, radius)?;
    let per_round = rounds
        .iter()
        .map(|r| Ok(l1_distance(&predict_duals(&best, &r.features)?, &r.target, r.demand.as_deref())))
        .collect::<Result<Vec<_>>>()?;
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

/// Best boxed matrix in hindsight. Rows decouple, so each row is a small
/// linear program; with one-dimensional features it is a weighted median.
fn feature_comparator(rounds: &[FeatureRound], n: usize, f: usize, radius: f64) -> Result<Matrix> {
    if f == 1 {
        let targets: Vec<Vec<f64>> = rounds.iter().map(|r| r.target.clone()).collect();
        let weights: Option<Vec<Vec<f64>>> = if rounds.iter().any(|r| r.demand.is_some()) {
            Some(rounds.iter().map(|r| r.demand.clone().unwrap_or_else(|| vec![1.0; n])).collect())
        } else {
            None
        };
        let (best, _) = best_in_hindsight_l1(&targets, weights.as_deref(), &BoxDomain::symmetric(n, radius)?)?;
        return Matrix::from_flat(n, 1, best);
    }
    let region = Polytope {
        bounds: vec![(-radius, radius); f],
        unit_sum_groups: vec![],
    };
    let mut data = Vec::with_capacity(n * f);
    for i in 0..n {
        let losses: Vec<MaxAffine> = rounds
            .iter()
            .map(|r| {
                let b = r.demand.as_ref().map_or(1.0, |d| d[i]);
                let terms: Vec<(usize, f64)> =
                    r.features.weights().iter().enumerate().map(|(k, &v)| (k, b * v)).collect();
                let neg = terms.iter().map(|&(k, v)| (k, -v)).collect();
                vec![
                    AffinePiece { terms, constant: -b * r.target[i] },
                    AffinePiece { terms: neg, constant: b * r.target[i] },
                ]
            })
            .collect();
        let (row, _) = minimize_sum_of_max_affine(&region, &losses)?;
        data.extend(row.into_iter().map(|v| v.clamp(-radius, radius)));
    }
    Matrix::from_flat(n, f, data).map_err(|e| Error::Lp(e.to_string()))
}
