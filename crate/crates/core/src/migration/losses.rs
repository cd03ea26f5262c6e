use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::learners::SimplexPoint;

/// One distribution over the metric's points per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionStack {
    rows: Vec<SimplexPoint>,
}

impl PredictionStack {
    pub fn new(rows: Vec<SimplexPoint>) -> Result<Self> {
        if let Some(first) = rows.first() {
            for r in &rows {
                check_dim(first.dim(), r.dim())?;
            }
        }
        Ok(PredictionStack { rows })
    }

    pub fn uniform(len: usize, points: usize) -> Self {
        PredictionStack {
            rows: vec![SimplexPoint::uniform(points); len],
        }
    }

    /// Point masses on the given sequence.
    pub fn one_hot(sequence: &[usize], points: usize) -> Result<Self> {
        if let Some(&bad) = sequence.iter().find(|&&s| s >= points) {
            return Err(Error::invalid(format!("point {bad} outside {points} points")));
        }
        let rows = sequence.iter().map(|&s| SimplexPoint::one_hot(points, s)).collect();
        Ok(PredictionStack { rows })
    }

    pub fn rows(&self) -> &[SimplexPoint] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of points each row ranges over (0 for an empty stack).
    pub fn points(&self) -> usize {
        self.rows.first().map_or(0, SimplexPoint::dim)
    }
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window == 0 || window > len {
        return Err(Error::invalid(format!("window {window} must lie in 1..={len}")));
    }
    Ok(())
}

/// Largest number of mismatches in any window, divided by the window length.
pub fn mistake_fraction(predicted: &[usize], requests: &[usize], window: usize) -> Result<f64> {
    check_dim(requests.len(), predicted.len())?;
    check_window(requests.len(), window)?;
    let miss: Vec<f64> = predicted
        .iter()
        .zip(requests)
        .map(|(p, s)| if p == s { 0.0 } else { 1.0 })
        .collect();
    let (_, best) = max_window(&miss, window);
    Ok(best / window as f64)
}

/// Start index and value of the largest window sum (lowest start on ties).
fn max_window(values: &[f64], window: usize) -> (usize, f64) {
    let mut sum: f64 = values[..window].iter().sum();
    let (mut arg, mut best) = (0, sum);
    for i in 1..=values.len() - window {
        sum += values[i + window - 1] - values[i - 1];
        if sum > best + 1e-12 {
            arg = i;
            best = sum;
        }
    }
    // recompute the winner directly to avoid drift from the running sum
    (arg, values[arg..arg + window].iter().sum())
}

fn miss_probabilities(p: &PredictionStack, requests: &[usize], window: usize) -> Result<Vec<f64>> {
    check_dim(requests.len(), p.len())?;
    check_window(requests.len(), window)?;
    requests
        .iter()
        .zip(p.rows())
        .map(|(&s, row)| {
            row.weights()
                .get(s)
                .map(|q| 1.0 - q)
                .ok_or_else(|| Error::invalid(format!("request {s} outside {} points", row.dim())))
        })
        .collect()
}

/// `max_i Σ_{j=i}^{i+w−1} (1 − p_j[s_j])`.
pub fn window_loss(p: &PredictionStack, requests: &[usize], window: usize) -> Result<f64> {
    let miss = miss_probabilities(p, requests, window)?;
    Ok(max_window(&miss, window).1)
}

/// Subgradient of [`window_loss`]: `−e_{s_j}` on every row of the heaviest
/// window (lowest start index on ties), zero elsewhere.
pub fn window_loss_subgradient(p: &PredictionStack, requests: &[usize], window: usize) -> Result<Vec<Vec<f64>>> {
    let miss = miss_probabilities(p, requests, window)?;
    let (start, _) = max_window(&miss, window);
    let mut g = vec![vec![0.0; p.points()]; p.len()];
    for j in start..start + window {
        g[j][requests[j]] = -1.0;
    }
    Ok(g)
}

/// Independent categorical draw per timestep.
pub fn sample_predictions<R: Rng + ?Sized>(p: &PredictionStack, rng: &mut R) -> Result<Vec<usize>> {
    if p.is_empty() {
        return Err(Error::invalid("cannot sample from an empty prediction stack"));
    }
    Ok(p.rows().iter().map(|row| categorical(row.weights(), rng)).collect())
}

pub(crate) fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn mistake_examples() {
        assert_eq!(mistake_fraction(&[1, 2, 3], &[1, 2, 3], 2).unwrap(), 0.0);
        assert_eq!(mistake_fraction(&[0, 0, 0], &[1, 2, 3], 2).unwrap(), 1.0);
        assert_eq!(mistake_fraction(&[9, 1, 2, 9], &[0, 1, 2, 3], 2).unwrap(), 0.5);
    }

    #[test]
    fn window_loss_examples() {
        let seq = [0, 1, 1, 0];
        assert_eq!(window_loss(&PredictionStack::one_hot(&seq, 2).unwrap(), &seq, 2).unwrap(), 0.0);
        let uniform = PredictionStack::uniform(2, 2);
        assert_eq!(window_loss(&uniform, &[0, 1], 2).unwrap(), 1.0);
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let rows = vec![
            SimplexPoint::new(vec![0.2, 0.5, 0.3]).unwrap(),
            SimplexPoint::new(vec![0.6, 0.1, 0.3]).unwrap(),
            SimplexPoint::new(vec![0.1, 0.1, 0.8]).unwrap(),
            SimplexPoint::new(vec![0.3, 0.3, 0.4]).unwrap(),
        ];
        let p = PredictionStack::new(rows.clone()).unwrap();
        let req = [1, 2, 0, 2];
        let g = window_loss_subgradient(&p, &req, 2).unwrap();
        let base = window_loss(&p, &req, 2).unwrap();
        let h = 1e-7;
        for j in 0..4 {
            for k in 0..3 {
                // perturb a single coordinate; the loss is linear in each
                // coordinate near a point without window ties
                let mut w: Vec<Vec<f64>> = rows.iter().map(|r| r.weights().to_vec()).collect();
                w[j][k] += h;
                let miss: Vec<f64> = req.iter().enumerate().map(|(i, &s)| 1.0 - w[i][s]).collect();
                let bumped = (0..=2).map(|i| miss[i] + miss[i + 1]).fold(f64::MIN, f64::max);
                assert!(((bumped - base) / h - g[j][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let seq = [2, 0, 1];
        let p = PredictionStack::one_hot(&seq, 3).unwrap();
        assert_eq!(sample_predictions(&p, &mut rng).unwrap(), seq);
        assert!(sample_predictions(&PredictionStack::uniform(0, 2), &mut rng).is_err());
        let uniform = PredictionStack::uniform(2, 2);
        let draws = 10_000;
        let mut ones = [0usize; 2];
        for _ in 0..draws {
            for (slot, s) in sample_predictions(&uniform, &mut rng).unwrap().into_iter().enumerate() {
                ones[slot] += s;
            }
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        for c in ones {
            assert!((c as f64 - 5000.0).abs() <= 3.0 * sigma);
        }
    }
}
