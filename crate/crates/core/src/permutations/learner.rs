use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::learners::RegretLedger;

use super::batch::{perm_error, JobBatch, PermutationMatrix};

/// Largest batch size the expert enumeration accepts.
pub const MAX_JOBS: usize = 8;

/// All `n!` permutations in lexicographic order of their column maps.
pub fn all_permutations(n: usize) -> Result<Vec<PermutationMatrix>> {
    if n > MAX_JOBS {
        return Err(Error::invalid(format!("{n} jobs exceeds the enumeration cap of {MAX_JOBS}")));
    }
    Ok((0..n)
        .permutations(n)
        .map(|sigma| PermutationMatrix::from_columns(sigma).expect("enumerated permutation"))
        .collect())
}

fn batch_size(batches: &[JobBatch]) -> Result<usize> {
    let n = batches.first().map_or(0, JobBatch::len);
    if batches.iter().any(|b| b.len() != n) {
        return Err(Error::invalid("batches must share one job count"));
    }
    Ok(n)
}

/// Minimizer of the summed error over all orders; the lexicographically
/// first wins ties.
pub fn brute_force_best_perm(batches: &[JobBatch]) -> Result<(PermutationMatrix, f64)> {
    let n = batch_size(batches)?;
    let mut best: Option<(PermutationMatrix, f64)> = None;
    for x in all_permutations(n)? {
        let total = batches.iter().map(|b| perm_error(&x, b)).sum::<Result<f64>>()?;
        if best.as_ref().is_none_or(|(_, v)| total < *v) {
            best = Some((x, total));
        }
    }
    Ok(best.expect("at least one permutation"))
}

/// Exponential weights over every order of `n ≤ 8` jobs.
///
/// `w_max` and `p_max` cap the batch entries; losses lie in `[0, L]` with
/// `L = W P n`. Step `√(ln n! / (2T)) / L`, bound `L √(2 n T ln n)`. Rows hold
/// the expected error under the current weights and the sampled order.
pub fn perm_eg_learner<R: Rng + ?Sized>(
    batches: &[JobBatch],
    w_max: f64,
    p_max: f64,
    step_override: Option<f64>,
    rng: &mut R,
) -> Result<RegretLedger> {
    let n = batch_size(batches)?;
    if batches
        .iter()
        .any(|b| b.weights().iter().any(|&w| w > w_max) || b.processing().iter().any(|&p| p > p_max))
    {
        return Err(Error::invalid("batch entries exceed the weight or processing cap"));
    }
    let experts = all_permutations(n)?;
    let t = batches.len() as f64;
    let range = w_max * p_max * n as f64;
    let nf = n as f64;
    let mut ledger = RegretLedger::new(range * (2.0 * nf * t * nf.ln()).sqrt());
    if batches.is_empty() {
        return Ok(ledger);
    }
    let count = experts.len() as f64;
    let step = step_override.unwrap_or(if range > 0.0 { (count.ln() / (2.0 * t)).sqrt() / range } else { 0.0 });
    let mut log_weights = vec![0.0; experts.len()];
    let mut probs = vec![0.0; experts.len()];
    for batch in batches {
        let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        probs.iter_mut().zip(&log_weights).for_each(|(p, l)| *p = (l - top).exp());
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let losses = experts.iter().map(|x| perm_error(x, batch)).collect::<Result<Vec<_>>>()?;
        let expected: f64 = probs.iter().zip(&losses).map(|(p, l)| p * l).sum();
        let pick = crate::migration::categorical(&probs, rng);
        ledger.push(expected, experts[pick].columns().iter().map(|&c| c as f64).collect());
        log_weights.iter_mut().zip(&losses).for_each(|(lw, l)| *lw -= step * l);
    }
    let (best, _) = brute_force_best_perm(batches)?;
    let per_round = batches.iter().map(|b| perm_error(&best, b)).collect::<Result<Vec<_>>>()?;
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
    fn enumeration_order_and_cap() {
        let all = all_permutations(3).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].columns(), &[0, 1, 2]);
        assert_eq!(all[1].columns(), &[0, 2, 1]);
        assert_eq!(all[5].columns(), &[2, 1, 0]);
        assert!(all_permutations(9).is_err());
    }

    #[test]
    fn brute_force_small() {
        let b = JobBatch::new(vec![1.0], vec![4.0]).unwrap();
        let (x, v) = brute_force_best_perm(&[b]).unwrap();
        assert_eq!(x, PermutationMatrix::identity(1));
        assert_eq!(v, 4.0);
        let b = JobBatch::new(vec![2.0, 1.0], vec![1.0, 1.0]).unwrap();
        let id = perm_error(&PermutationMatrix::identity(2), &b).unwrap();
        let swap = perm_error(&PermutationMatrix::from_columns(vec![1, 0]).unwrap(), &b).unwrap();
        let (x, v) = brute_force_best_perm(std::slice::from_ref(&b)).unwrap();
        assert_eq!(v, id.min(swap));
        assert_eq!(x.columns(), &[1, 0]);
        // every order ties on zero batches: the first one wins
        let z = JobBatch::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
        assert_eq!(brute_force_best_perm(&[z]).unwrap().0, PermutationMatrix::identity(3));
    }

    #[test]
    fn constant_stream_concentrates() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let b = JobBatch::new(vec![1.0, 0.2, 0.7, 0.4], vec![0.9, 1.0, 0.3, 0.6]).unwrap();
        let batches = vec![b; 3000];
        let ledger = perm_eg_learner(&batches, 1.0, 1.0, Some(0.5), &mut rng).unwrap();
        let (best, _) = brute_force_best_perm(&batches[..1]).unwrap();
        assert!(regret_report(&ledger).satisfied);
        let last = ledger.rounds.last().unwrap();
        assert!((last.loss - ledger.rounds[0].comparator_loss).abs() < 1e-3);
        let picked: Vec<usize> = last.action.iter().map(|&c| c as usize).collect();
        assert_eq!(perm_error(&PermutationMatrix::from_columns(picked).unwrap(), &batches[0]).unwrap(),
            perm_error(&best, &batches[0]).unwrap());
    }

    #[test]
    fn single_job_has_no_regret() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let batches = vec![JobBatch::new(vec![0.5], vec![0.5]).unwrap(); 10];
        let ledger = perm_eg_learner(&batches, 1.0, 1.0, None, &mut rng).unwrap();
        assert_eq!(ledger.regret(), 0.0);
    }
}
