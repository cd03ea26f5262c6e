use crate::error::{check_dim, Result};

use super::metric::{MetricSpace, MigrationProblem};

/// A state sequence and its cost against a request sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub total_cost: f64,
}

/// `Σ_j d(a_j, s_j) + D Σ_{j≥2} d(a_{j−1}, a_j)`; the page starts wherever the
/// first state is, so the first step carries no migration charge.
pub fn trajectory_cost(metric: &MetricSpace, migration_cost: f64, states: &[usize], requests: &[usize]) -> f64 {
    let serve: f64 = states
        .iter()
        .zip(requests)
        .map(|(&a, &s)| metric.distance(a, s))
        .sum();
    let moves: f64 = states
        .windows(2)
        .map(|w| metric.distance(w[0], w[1]))
        .sum();
    serve + migration_cost * moves
}

fn optimal_states(metric: &MetricSpace, migration_cost: f64, requests: &[usize]) -> Vec<usize> {
    let k = metric.size();
    let n = requests.len();
    if n == 0 {
        return Vec::new();
    }
    let mut cost: Vec<f64> = (0..k).map(|a| metric.distance(a, requests[0])).collect();
    let mut back = vec![0usize; n * k];
    for (j, &s) in requests.iter().enumerate().skip(1) {
        let mut next = vec![0.0; k];
        for a in 0..k {
            let (arg, best) = (0..k)
                .map(|p| (p, cost[p] + migration_cost * metric.distance(p, a)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            back[j * k + a] = arg;
            next[a] = best + metric.distance(a, s);
        }
        cost = next;
    }
    let mut last = (0..k)
        .fold(0, |best, a| if cost[a] < cost[best] { a } else { best });
    let mut states = vec![0; n];
    for j in (0..n).rev() {
        states[j] = last;
        last = back[j * k + last];
    }
    states
}

/// Offline optimum by dynamic programming over (timestep, state), `O(n K²)`.
/// Ties go to the lowest state index.
pub fn offline_opt(metric: &MetricSpace, problem: &MigrationProblem) -> Result<Trajectory> {
    problem.check_against(metric)?;
    let states = optimal_states(metric, problem.migration_cost(), problem.requests());
    let total_cost = trajectory_cost(metric, problem.migration_cost(), &states, problem.requests());
    Ok(Trajectory { states, total_cost })
}

/// Plans the offline-optimal trajectory for the predicted sequence and executes
/// it unchanged against the true requests, returning the realized cost.
pub fn lazy_predicted_run(metric: &MetricSpace, problem: &MigrationProblem, predicted: &[usize]) -> Result<f64> {
    check_dim(problem.len(), predicted.len())?;
    problem.check_against(metric)?;
    MigrationProblem::new(predicted.to_vec(), problem.migration_cost(), problem.window())?
        .check_against(metric)?;
    let states = optimal_states(metric, problem.migration_cost(), predicted);
    Ok(trajectory_cost(metric, problem.migration_cost(), &states, problem.requests()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MetricSpace {
        MetricSpace::new(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn single_point_is_free() {
        let m = MetricSpace::uniform(1);
        let p = MigrationProblem::new(vec![0; 5], 3.0, 2).unwrap();
        assert_eq!(offline_opt(&m, &p).unwrap().total_cost, 0.0);
        assert_eq!(lazy_predicted_run(&m, &p, &[0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn expensive_moves_park_at_median() {
        let m = line3();
        let requests = vec![0, 2, 1, 2, 2, 0, 2];
        let p = MigrationProblem::new(requests.clone(), 1e6, 2).unwrap();
        let t = offline_opt(&m, &p).unwrap();
        let constant: Vec<f64> = (0..3)
            .map(|a| requests.iter().map(|&s| m.distance(a, s)).sum())
            .collect();
        let best = constant.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(t.total_cost, best);
        assert!(t.states.iter().all(|&a| a == t.states[0]));
    }

    #[test]
    fn perfect_prediction_is_optimal() {
        let m = line3();
        let p = MigrationProblem::new(vec![0, 0, 2, 2, 2, 1], 2.5, 2).unwrap();
        let opt = offline_opt(&m, &p).unwrap().total_cost;
        assert_eq!(lazy_predicted_run(&m, &p, p.requests()).unwrap(), opt);
        assert!(lazy_predicted_run(&m, &p, &[2, 2, 0, 0, 0, 0]).unwrap() >= opt);
        assert!(lazy_predicted_run(&m, &p, &[0, 0]).is_err());
    }
}
