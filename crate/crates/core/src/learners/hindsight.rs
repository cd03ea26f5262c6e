//! Best-fixed-action comparators and online-to-batch averaging.

use crate::error::{check_dim, Error, Result};

use super::domain::BoxDomain;
use super::subgradient::l1_distance;

/// Smallest value whose cumulative weight reaches half the total weight.
///
/// Any point between the lower and upper weighted medians minimizes
/// `Σ w_i |x − v_i|`; this picks the lower one. Returns `None` when the total
/// weight is zero.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Option<f64> {
    let total: f64 = weights.iter().sum();
    if values.is_empty() || !(total > 0.0) {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if 2.0 * acc >= total {
            return Some(values[i]);
        }
    }
    order.last().map(|&i| values[i])
}

/// Minimizer over `domain` of `Σ_t ‖x − target_t‖_{weights_t,1}` and its loss.
///
/// The objective separates over coordinates and each coordinate's objective is
/// convex, so the clipped weighted median is optimal. Coordinates with zero
/// total weight are set to the projection of zero.
pub fn best_in_hindsight_l1(
    targets: &[Vec<f64>],
    weights: Option<&[Vec<f64>]>,
    domain: &BoxDomain,
) -> Result<(Vec<f64>, f64)> {
    if targets.is_empty() {
        return Err(Error::invalid("comparator needs at least one target"));
    }
    let dim = domain.dim();
    for t in targets {
        check_dim(dim, t.len())?;
    }
    if let Some(w) = weights {
        check_dim(targets.len(), w.len())?;
        for row in w {
            check_dim(dim, row.len())?;
            if row.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::invalid("seminorm weights must be nonnegative"));
            }
        }
    }
    let mut point = vec![0.0; dim];
    let mut column = Vec::with_capacity(targets.len());
    let mut column_w = Vec::with_capacity(targets.len());
    for (i, slot) in point.iter_mut().enumerate() {
        column.clear();
        column_w.clear();
        column.extend(targets.iter().map(|t| t[i]));
        column_w.extend((0..targets.len()).map(|t| weights.map_or(1.0, |w| w[t][i])));
        let median = weighted_median(&column, &column_w).unwrap_or(0.0);
        *slot = median.clamp(domain.lower()[i], domain.upper()[i]);
    }
    let loss = targets
        .iter()
        .enumerate()
        .map(|(t, target)| l1_distance(&point, target, weights.map(|w| w[t].as_slice())))
        .sum();
    Ok((point, loss))
}

/// Averages the iterates of an online learner.
pub fn online_to_batch(iterates: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = iterates
        .first()
        .ok_or_else(|| Error::invalid("cannot average an empty iterate list"))?;
    let mut sum = vec![0.0; first.len()];
    for x in iterates {
        check_dim(sum.len(), x.len())?;
        sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
    }
    let count = iterates.len() as f64;
    sum.iter_mut().for_each(|s| *s /= count);
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> BoxDomain {
        BoxDomain::symmetric(1, 100.0).unwrap()
    }

    #[test]
    fn median_of_three() {
        let targets = vec![vec![1.0], vec![5.0], vec![3.0]];
        let (x, loss) = best_in_hindsight_l1(&targets, None, &wide()).unwrap();
        assert_eq!(x, vec![3.0]);
        assert_eq!(loss, 4.0);
    }

    #[test]
    fn single_target() {
        let (x, loss) = best_in_hindsight_l1(&[vec![2.5, -1.0]], None, &BoxDomain::symmetric(2, 5.0).unwrap())
            .unwrap();
        assert_eq!(x, vec![2.5, -1.0]);
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn heavier_point_wins() {
        let targets = vec![vec![0.0], vec![10.0]];
        let weights = vec![vec![3.0], vec![1.0]];
        let (x, loss) = best_in_hindsight_l1(&targets, Some(&weights), &wide()).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_eq!(loss, 10.0);
    }

    #[test]
    fn clipped_to_box() {
        let targets = vec![vec![7.0], vec![9.0]];
        let (x, _) = best_in_hindsight_l1(&targets, None, &BoxDomain::symmetric(1, 5.0).unwrap()).unwrap();
        assert_eq!(x, vec![5.0]);
    }

    #[test]
    fn averaging() {
        assert_eq!(online_to_batch(&[vec![4.0]]).unwrap(), vec![4.0]);
        assert_eq!(online_to_batch(&[vec![0.0], vec![2.0]]).unwrap(), vec![1.0]);
        assert_eq!(online_to_batch(&vec![vec![1.5, 2.0]; 4]).unwrap(), vec![1.5, 2.0]);
        assert!(online_to_batch(&[]).is_err());
    }
}
