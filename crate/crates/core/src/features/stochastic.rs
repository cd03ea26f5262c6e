use crate::error::{check_dim, Error, Result};
use crate::learners::lp::{minimize_sum_of_max_affine, AffinePiece, MaxAffine, Polytope};
use crate::learners::{eg_step, RegretLedger, SimplexPoint};
use crate::migration::{window_loss, window_loss_subgradient, PredictionStack};

/// `n` maps of shape `K × f`, stored column by column; every column is a
/// distribution over the `K` points.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticStack {
    points: usize,
    columns: Vec<Vec<SimplexPoint>>,
}

impl StochasticStack {
    /// `columns[j][c]` is column `c` of map `j`.
    pub fn new(columns: Vec<Vec<SimplexPoint>>) -> Result<Self> {
        let points = columns
            .first()
            .and_then(|m| m.first())
            .map(SimplexPoint::dim)
            .ok_or_else(|| Error::invalid("stack needs at least one map with one column"))?;
        let f = columns[0].len();
        for map in &columns {
            check_dim(f, map.len())?;
            for col in map {
                check_dim(points, col.dim())?;
            }
        }
        Ok(StochasticStack { points, columns })
    }

    /// Every column uniform.
    pub fn uniform(len: usize, points: usize, feature_dim: usize) -> Self {
        StochasticStack {
            points,
            columns: vec![vec![SimplexPoint::uniform(points); feature_dim]; len],
        }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn feature_dim(&self) -> usize {
        self.columns[0].len()
    }

    pub fn map(&self, j: usize) -> &[SimplexPoint] {
        &self.columns[j]
    }
}

fn mix(columns: &[SimplexPoint], features: &SimplexPoint) -> Result<SimplexPoint> {
    check_dim(columns.len(), features.dim())?;
    if let [only] = columns {
        return Ok(only.clone());
    }
    let mut out = vec![0.0; columns[0].dim()];
    for (col, &w) in columns.iter().zip(features.weights()) {
        out.iter_mut().zip(col.weights()).for_each(|(o, v)| *o += w * v);
    }
    SimplexPoint::normalized(out)
}

/// Row `j` of the result is `A_j f`. A single map is shared by every timestep
/// when the stack has length one.
pub fn predict_distributions(stack: &StochasticStack, features: &[SimplexPoint]) -> Result<PredictionStack> {
    if stack.len() != 1 {
        check_dim(stack.len(), features.len())?;
    }
    let rows = features
        .iter()
        .enumerate()
        .map(|(j, f)| mix(stack.map(if stack.len() == 1 { 0 } else { j }), f))
        .collect::<Result<Vec<_>>>()?;
    PredictionStack::new(rows)
}

/// Requests of one instance and a feature vector for each timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationRound {
    pub requests: Vec<usize>,
    pub features: Vec<SimplexPoint>,
}

fn check_rounds(rounds: &[MigrationRound]) -> Result<(usize, usize)> {
    let n = rounds.first().map_or(0, |r| r.requests.len());
    let f = rounds.first().and_then(|r| r.features.first()).map_or(1, SimplexPoint::dim);
    for r in rounds {
        check_dim(n, r.requests.len())?;
        check_dim(n, r.features.len())?;
        for x in &r.features {
            check_dim(f, x.dim())?;
        }
    }
    Ok((n, f))
}

/// Column-wise EG on a single `K × f` map shared by all timesteps.
///
/// Step `√(2 ln K / (w² T))`, bound `w f √(2 T ln K)` with `w` the window.
/// Every timestep of the heaviest window feeds the same map, so column
/// gradients reach `w` in sup norm and the step is tuned for that range.
pub fn shared_map_learner(
    rounds: &[MigrationRound],
    points: usize,
    window: usize,
    step_override: Option<f64>,
) -> Result<RegretLedger> {
    map_learner(rounds, points, window, step_override, true)
}

/// One map per timestep, each updated column-wise by EG.
///
/// Step `√(ln K / (2 w² T))`, bound `w n f √(2 T ln K)`. With one-dimensional
/// features this is [`eg_sequence_learner`](crate::migration::eg_sequence_learner).
pub fn stacked_map_learner(
    rounds: &[MigrationRound],
    points: usize,
    window: usize,
    step_override: Option<f64>,
) -> Result<RegretLedger> {
    map_learner(rounds, points, window, step_override, false)
}

fn map_learner(
    rounds: &[MigrationRound],
    points: usize,
    window: usize,
    step_override: Option<f64>,
    shared: bool,
) -> Result<RegretLedger> {
    let (n, f) = check_rounds(rounds)?;
    let t = rounds.len() as f64;
    let k = points as f64;
    let w = window as f64;
    let maps = if shared { 1 } else { n };
    let mut ledger = RegretLedger::new(w * (maps * f) as f64 * (2.0 * t * k.ln()).sqrt());
    if rounds.is_empty() {
        return Ok(ledger);
    }
    let default_step = if shared {
        (2.0 * k.ln() / (w * w * t)).sqrt()
    } else {
        (k.ln() / (2.0 * w * w * t)).sqrt()
    };
    let step = step_override.unwrap_or(default_step);
    let mut stack = StochasticStack::uniform(maps, points, f);
    for r in rounds {
        let p = predict_distributions(&stack, &r.features)?;
        ledger.push(window_loss(&p, &r.requests, window)?, flatten(&stack));
        let g = window_loss_subgradient(&p, &r.requests, window)?;
        // chain rule through p_j = A f_j: column c of the map receives f_j[c]·g_j
        let mut grads = vec![vec![vec![0.0; points]; f]; maps];
        for (j, gj) in g.iter().enumerate() {
            let m = if shared { 0 } else { j };
            for (c, &fc) in r.features[j].weights().iter().enumerate() {
                grads[m][c].iter_mut().zip(gj).for_each(|(a, v)| *a += fc * v);
            }
        }
        let columns = stack
            .columns
            .iter()
            .zip(&grads)
            .map(|(map, gm)| map.iter().zip(gm).map(|(col, gc)| eg_step(col, gc, step)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        stack = StochasticStack::new(columns)?;
    }
    let best = map_comparator(rounds, points, window, maps, f)?;
    let per_round = rounds
        .iter()
        .map(|r| window_loss(&predict_distributions(&best, &r.features)?, &r.requests, window))
        .collect::<Result<Vec<_>>>()?;
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

/// Map-major, then column, then point.
fn flatten(stack: &StochasticStack) -> Vec<f64> {
    stack
        .columns
        .iter()
        .flat_map(|m| m.iter().flat_map(|c| c.weights().to_vec()))
        .collect()
}

fn map_comparator(
    rounds: &[MigrationRound],
    points: usize,
    window: usize,
    maps: usize,
    f: usize,
) -> Result<StochasticStack> {
    let var = |m: usize, c: usize, k: usize| (m * f + c) * points + k;
    let losses: Vec<MaxAffine> = rounds
        .iter()
        .map(|r| {
            (0..=r.requests.len() - window)
                .map(|i| {
                    let mut terms = Vec::new();
                    for j in i..i + window {
                        let m = if maps == 1 { 0 } else { j };
                        for (c, &fc) in r.features[j].weights().iter().enumerate() {
                            if fc != 0.0 {
                                terms.push((var(m, c, r.requests[j]), -fc));
                            }
                        }
                    }
                    AffinePiece { terms, constant: window as f64 }
                })
                .collect()
        })
        .collect();
    let region = Polytope {
        bounds: vec![(0.0, 1.0); maps * f * points],
        unit_sum_groups: (0..maps * f).map(|g| (g * points..(g + 1) * points).collect()).collect(),
    };
    let (x, _) = minimize_sum_of_max_affine(&region, &losses)?;
    let columns = x
        .chunks(points * f)
        .map(|m| {
            m.chunks(points)
                .map(|c| SimplexPoint::normalized(c.iter().map(|v| v.max(0.0)).collect()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    StochasticStack::new(columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::regret_report;
    use crate::migration::eg_sequence_learner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn one_hot_features_select_columns() {
        let cols = vec![
            SimplexPoint::new(vec![1.0, 0.0, 0.0]).unwrap(),
            SimplexPoint::new(vec![0.0, 0.5, 0.5]).unwrap(),
        ];
        let stack = StochasticStack::new(vec![cols.clone()]).unwrap();
        let p = predict_distributions(&stack, &[SimplexPoint::one_hot(2, 1), SimplexPoint::one_hot(2, 0)]).unwrap();
        assert_eq!(p.rows()[0], cols[1]);
        assert_eq!(p.rows()[1], cols[0]);
        let u = predict_distributions(&StochasticStack::uniform(1, 4, 3), &[SimplexPoint::uniform(3)]).unwrap();
        assert!(u.rows()[0].weights().iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn stacked_with_trivial_features_matches_sequence_learner() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let seqs: Vec<Vec<usize>> = (0..150).map(|_| (0..7).map(|_| rng.random_range(0..3)).collect()).collect();
        let rounds: Vec<MigrationRound> = seqs
            .iter()
            .map(|s| MigrationRound { requests: s.clone(), features: vec![SimplexPoint::uniform(1); 7] })
            .collect();
        let a = eg_sequence_learner(&seqs, 3, 2, None).unwrap();
        let b = stacked_map_learner(&rounds, 3, 2, None).unwrap();
        assert_eq!(a.rounds, b.rounds);
        assert!((a.comparator_loss - b.comparator_loss).abs() < 1e-6);
    }

    #[test]
    fn shared_map_learns_feature_dependent_requests() {
        // request = argmax of the one-hot feature at each timestep
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let rounds: Vec<MigrationRound> = (0..2000)
            .map(|_| {
                let requests: Vec<usize> = (0..6).map(|_| rng.random_range(0..3)).collect();
                let features = requests.iter().map(|&s| SimplexPoint::one_hot(3, s)).collect();
                MigrationRound { requests, features }
            })
            .collect();
        let ledger = shared_map_learner(&rounds, 3, 2, None).unwrap();
        assert!(ledger.comparator_loss < 1e-6);
        assert!(regret_report(&ledger).satisfied);
        assert!(ledger.rounds.last().unwrap().loss < 0.2);
    }
}
