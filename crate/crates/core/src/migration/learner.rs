use crate::error::{Error, Result};
use crate::learners::lp::{minimize_sum_of_max_affine, AffinePiece, MaxAffine, Polytope};
use crate::learners::{eg_step, RegretLedger, SimplexPoint};

use super::losses::{window_loss, window_loss_subgradient, PredictionStack};

/// Window loss of round `t` as a max of affine functions of the flattened
/// stack (`row * points + point`).
fn window_pieces(requests: &[usize], points: usize, window: usize) -> MaxAffine {
    (0..=requests.len() - window)
        .map(|i| AffinePiece {
            terms: (i..i + window).map(|j| (j * points + requests[j], -1.0)).collect(),
            constant: window as f64,
        })
        .collect()
}

/// Best fixed prediction stack in hindsight, solved as a linear program.
/// Returns the stack and its per-round losses.
pub fn stack_comparator(
    sequences: &[Vec<usize>],
    points: usize,
    window: usize,
) -> Result<(PredictionStack, Vec<f64>)> {
    let n = sequences.first().map_or(0, Vec::len);
    let losses: Vec<MaxAffine> = sequences
        .iter()
        .map(|s| window_pieces(s, points, window))
        .collect();
    let region = Polytope {
        bounds: vec![(0.0, 1.0); n * points],
        unit_sum_groups: (0..n).map(|j| (j * points..(j + 1) * points).collect()).collect(),
    };
    let (x, _) = minimize_sum_of_max_affine(&region, &losses)?;
    let rows = x
        .chunks(points)
        .map(|c| SimplexPoint::normalized(c.iter().map(|v| v.max(0.0)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let stack = PredictionStack::new(rows)?;
    let per_round = sequences
        .iter()
        .map(|s| window_loss(&stack, s, window))
        .collect::<Result<Vec<_>>>()?;
    Ok((stack, per_round))
}

/// One EG learner per timestep, all fed the window-loss subgradient.
///
/// Step `√(ln K / (2 w² T))`, bound `w n √(2 T ln K)` where `w` is the window.
pub fn eg_sequence_learner(
    sequences: &[Vec<usize>],
    points: usize,
    window: usize,
    step_override: Option<f64>,
) -> Result<RegretLedger> {
    let n = sequences.first().map_or(0, Vec::len);
    if sequences.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("request sequences must share one length"));
    }
    let t = sequences.len() as f64;
    let k = points as f64;
    let w = window as f64;
    let mut ledger = RegretLedger::new(w * n as f64 * (2.0 * t * k.ln()).sqrt());
    if sequences.is_empty() {
        return Ok(ledger);
    }
    let step = step_override.unwrap_or((k.ln() / (2.0 * w * w * t)).sqrt());
    let mut stack = PredictionStack::uniform(n, points);
    for s in sequences {
        let loss = window_loss(&stack, s, window)?;
        let action = stack.rows().iter().flat_map(|r| r.weights().to_vec()).collect();
        ledger.push(loss, action);
        let g = window_loss_subgradient(&stack, s, window)?;
        let rows = stack
            .rows()
            .iter()
            .zip(&g)
            .map(|(row, gj)| eg_step(row, gj, step))
            .collect::<Result<Vec<_>>>()?;
        stack = PredictionStack::new(rows)?;
    }
    let (_, per_round) = stack_comparator(sequences, points, window)?;
    ledger.set_comparator(&per_round);
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::regret_report;

    #[test]
    fn constant_requests_are_learned() {
        let seqs = vec![vec![0, 2, 1, 1, 0, 2]; 3000];
        let ledger = eg_sequence_learner(&seqs, 3, 2, None).unwrap();
        assert!(ledger.comparator_loss.abs() < 1e-7);
        assert!(regret_report(&ledger).satisfied);
        let first = ledger.rounds[0].loss;
        let last = ledger.rounds.last().unwrap().loss;
        assert!(last < 0.1 * first, "{first} -> {last}");
    }

    #[test]
    fn single_round() {
        let ledger = eg_sequence_learner(&[vec![1, 0, 1]], 2, 2, None).unwrap();
        assert!(regret_report(&ledger).satisfied);
    }
}
