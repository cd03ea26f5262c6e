use std::path::Path;

use crate::error::{check_dim, Error, Result};

/// Job sizes of a non-clairvoyant instance with their predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRobinInstance {
    true_sizes: Vec<f64>,
    predicted_sizes: Vec<f64>,
    eta: f64,
}

impl RoundRobinInstance {
    pub fn new(true_sizes: Vec<f64>, predicted_sizes: Vec<f64>) -> Result<Self> {
        check_dim(true_sizes.len(), predicted_sizes.len())?;
        if true_sizes.is_empty() {
            return Err(Error::invalid("instance needs at least one job"));
        }
        if true_sizes
            .iter()
            .chain(&predicted_sizes)
            .any(|p| !(*p > 0.0) || !p.is_finite())
        {
            return Err(Error::invalid("job sizes and predictions must be positive"));
        }
        let eta = true_sizes
            .iter()
            .zip(&predicted_sizes)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(RoundRobinInstance {
            true_sizes,
            predicted_sizes,
            eta,
        })
    }

    pub fn true_sizes(&self) -> &[f64] {
        &self.true_sizes
    }

    pub fn predicted_sizes(&self) -> &[f64] {
        &self.predicted_sizes
    }

    pub fn len(&self) -> usize {
        self.true_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_sizes.is_empty()
    }

    /// Total absolute prediction error `η`.
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// `min{(1 + 2η/n)/(1 − λ), 2/λ}` for `λ ∈ (0, 1)`.
pub fn rr_bound(lambda: f64, eta: f64, n: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid("trade-off parameter must lie in (0, 1)"));
    }
    if !(eta >= 0.0) || n == 0 {
        return Err(Error::invalid("need η ≥ 0 and at least one job"));
    }
    Ok(((1.0 + 2.0 * eta / n as f64) / (1.0 - lambda)).min(2.0 / lambda))
}

/// Total completion time of shortest-job-first on the true sizes.
pub fn spt_total_completion(sizes: &[f64]) -> f64 {
    let mut sorted = sizes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    sorted
        .iter()
        .enumerate()
        .map(|(i, p)| (n - i) as f64 * p)
        .sum()
}

/// Exact event-driven run of preferential round-robin: at every instant a
/// share `λ` of the processor is split evenly over the alive jobs and the
/// remaining `1 − λ` goes to the alive job with the smallest prediction (lowest
/// index on ties). Returns total completion time over the SPT optimum.
pub fn rr_simulate(instance: &RoundRobinInstance, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid("trade-off parameter must lie in [0, 1]"));
    }
    let n = instance.len();
    let mut remaining = instance.true_sizes.clone();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut now = 0.0;
    let mut total = 0.0;
    let mut rates = vec![0.0; n];
    while !alive.is_empty() {
        let favorite = *alive
            .iter()
            .min_by(|&&a, &&b| {
                instance.predicted_sizes[a]
                    .total_cmp(&instance.predicted_sizes[b])
                    .then(a.cmp(&b))
            })
            .expect("alive is nonempty");
        let share = lambda / alive.len() as f64;
        for &j in &alive {
            rates[j] = share + if j == favorite { 1.0 - lambda } else { 0.0 };
        }
        let dt = alive
            .iter()
            .filter(|&&j| rates[j] > 0.0)
            .map(|&j| remaining[j] / rates[j])
            .fold(f64::INFINITY, f64::min);
        now += dt;
        let mut finished = Vec::new();
        for &j in &alive {
            remaining[j] -= rates[j] * dt;
            if rates[j] > 0.0 && remaining[j] <= 1e-12 * instance.true_sizes[j] {
                finished.push(j);
            }
        }
        // at least the job attaining the minimum finishes
        if finished.is_empty() {
            let j = alive
                .iter()
                .copied()
                .filter(|&j| rates[j] > 0.0)
                .min_by(|&a, &b| (remaining[a] / rates[a]).total_cmp(&(remaining[b] / rates[b])))
                .expect("some job has positive rate");
            finished.push(j);
        }
        total += now * finished.len() as f64;
        alive.retain(|j| !finished.contains(j));
    }
    Ok(total / spt_total_completion(&instance.true_sizes))
}

/// `n`, then the true sizes line, then the predicted sizes line.
pub fn read_round_robin(path: &Path) -> Result<RoundRobinInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    if lines.len() != 3 {
        return Err(err(0, format!("expected 3 nonempty lines, found {}", lines.len())));
    }
    let n: usize = lines[0]
        .1
        .trim()
        .parse()
        .map_err(|_| err(lines[0].0, "expected job count".into()))?;
    let parse = |(line, text): (usize, &str)| -> Result<Vec<f64>> {
        let vals: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(line, format!("expected a size, found {t:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() != n {
            return Err(err(line, format!("expected {n} sizes, found {}", vals.len())));
        }
        Ok(vals)
    };
    RoundRobinInstance::new(parse(lines[1])?, parse(lines[2])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert!((rr_bound(1e-9, 0.0, 5).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(rr_bound(0.5, 0.0, 3).unwrap(), 2.0);
        assert_eq!(rr_bound(0.5, 4.0, 4).unwrap(), 4.0);
        assert!(rr_bound(0.0, 0.0, 1).is_err());
        assert!(rr_bound(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn one_job() {
        let inst = RoundRobinInstance::new(vec![3.0], vec![7.0]).unwrap();
        assert_eq!(inst.eta(), 4.0);
        assert!((rr_simulate(&inst, 0.3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions_near_optimal() {
        let sizes = vec![4.0, 1.0, 3.0, 2.0, 5.0];
        let inst = RoundRobinInstance::new(sizes.clone(), sizes).unwrap();
        let ratio = rr_simulate(&inst, 0.01).unwrap();
        assert!((1.0..=1.05).contains(&ratio), "{ratio}");
        assert!((rr_simulate(&inst, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_round_robin_two_equal_jobs() {
        // both finish at time 2 under processor sharing; SPT gives 1 + 2
        let inst = RoundRobinInstance::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!((rr_simulate(&inst, 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spt_reference() {
        assert_eq!(spt_total_completion(&[3.0, 1.0, 2.0]), 1.0 + 3.0 + 6.0);
    }
}
