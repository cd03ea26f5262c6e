//! Randomized invariants across modules.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use predlearn::features::{autoregressive_features, predict_distributions, predict_duals, StochasticStack};
use predlearn::learners::subgradient::{l1_distance, linf_distance};
use predlearn::learners::{
    best_in_hindsight_l1, eg_step, l1_subgradient, linf_subgradient, BoxDomain, SimplexPoint,
};
use predlearn::matching::{
    b_matching_solve, dual_error, hungarian_solve, round_to_integer, warmstart_solve, BipartiteInstance, DualNorm,
};
use predlearn::migration::{offline_opt, trajectory_cost, window_loss, MetricSpace, MigrationProblem, PredictionStack};
use predlearn::permutations::{all_permutations, perm_error, JobBatch, PermutationMatrix};
use predlearn::scheduling::{
    fractional_assign, logit_loss, offline_fractional_opt, rr_bound, rr_simulate, spt_total_completion,
    AssignmentInstance, RoundRobinInstance,
};
use predlearn::skirental::{continuous_bound, discrete_bound, SkiSeason};
use predlearn::Matrix;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn random_simplex(dim: usize, r: &mut ChaCha20Rng) -> SimplexPoint {
    SimplexPoint::normalized((0..dim).map(|_| r.random::<f64>() + 1e-12).collect()).unwrap()
}

fn random_box(dim: usize, r: &mut ChaCha20Rng) -> BoxDomain {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for _ in 0..dim {
        let a = r.random_range(-10.0..10.0);
        let b = r.random_range(-10.0..10.0);
        lo.push(f64::min(a, b));
        hi.push(f64::max(a, b));
    }
    BoxDomain::new(lo, hi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), dim in 1usize..8) {
        let mut r = rng(seed);
        let domain = random_box(dim, &mut r);
        let x: Vec<f64> = (0..dim).map(|_| r.random_range(-30.0..30.0)).collect();
        let once = domain.project(&x).unwrap();
        prop_assert!(domain.contains(&once));
        prop_assert_eq!(domain.project(&once).unwrap(), once);
    }

    #[test]
    fn eg_stays_on_simplex(seed in any::<u64>(), dim in 1usize..10, step in 1e-4f64..5.0) {
        let mut r = rng(seed);
        let p = random_simplex(dim, &mut r);
        let g: Vec<f64> = (0..dim).map(|_| r.random_range(-20.0..20.0)).collect();
        let q = eg_step(&p, &g, step).unwrap();
        let total: f64 = q.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        prop_assert!(q.weights().iter().all(|w| *w >= 0.0));
    }

    #[test]
    fn subgradients_support_their_losses(seed in any::<u64>(), dim in 1usize..8) {
        let mut r = rng(seed);
        let mut v = || (0..dim).map(|_| r.random_range(-5.0..5.0)).collect::<Vec<f64>>();
        let (x, y, target) = (v(), v(), v());
        let weights: Vec<f64> = (0..dim).map(|_| r.random_range(0.0..4.0)).collect();
        let inner = |g: &[f64]| g.iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum::<f64>();
        for w in [None, Some(weights.as_slice())] {
            let g = l1_subgradient(&x, &target, w).unwrap();
            prop_assert!(l1_distance(&y, &target, w) >= l1_distance(&x, &target, w) + inner(&g) - 1e-9);
        }
        let g = linf_subgradient(&x, &target).unwrap();
        prop_assert!(linf_distance(&y, &target) >= linf_distance(&x, &target) + inner(&g) - 1e-9);
    }

    #[test]
    fn rounding_loses_at_most_factor_two(seed in any::<u64>(), n in 1usize..50) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-20i64..=20) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-25.0..25.0)).collect();
        let b: Vec<u32> = (0..n).map(|_| r.random_range(0..=5)).collect();
        let rounded: Vec<f64> = round_to_integer(&y).unwrap().into_iter().map(|v| v as f64).collect();
        for norm in [DualNorm::L1, DualNorm::WeightedL1, DualNorm::Linf] {
            let lhs = dual_error(&rounded, &x, Some(&b), norm).unwrap();
            let rhs = dual_error(&y, &x, Some(&b), norm).unwrap();
            prop_assert!(lhs <= 2.0 * rhs, "{:?}: {} > 2 * {}", norm, lhs, rhs);
        }
    }

    #[test]
    fn window_loss_is_convex(seed in any::<u64>(), n in 2usize..12, k in 2usize..6, lambda in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let window = r.random_range(1..=n);
        let p: Vec<SimplexPoint> = (0..n).map(|_| random_simplex(k, &mut r)).collect();
        let q: Vec<SimplexPoint> = (0..n).map(|_| random_simplex(k, &mut r)).collect();
        let mix: Vec<SimplexPoint> = p
            .iter()
            .zip(&q)
            .map(|(a, b)| {
                SimplexPoint::normalized(a.weights().iter().zip(b.weights()).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect())
                    .unwrap()
            })
            .collect();
        let s: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let u = |rows: Vec<SimplexPoint>| window_loss(&PredictionStack::new(rows).unwrap(), &s, window).unwrap();
        prop_assert!(u(mix) <= lambda * u(p) + (1.0 - lambda) * u(q) + 1e-9);
    }

    #[test]
    fn feature_predictions_stay_in_domain(seed in any::<u64>(), n in 1usize..6, f in 1usize..5, k in 2usize..5) {
        let mut r = rng(seed);
        let cap = r.random_range(0.1..10.0);
        let a = Matrix::from_flat(n, f, (0..n * f).map(|_| r.random_range(-cap..=cap)).collect()).unwrap();
        let feat = random_simplex(f, &mut r);
        let x = predict_duals(&a, &feat).unwrap();
        prop_assert!(x.iter().all(|v| v.abs() <= a.max_abs() + 1e-12));
        let stack = StochasticStack::new(
            (0..n).map(|_| (0..f).map(|_| random_simplex(k, &mut r)).collect()).collect(),
        )
        .unwrap();
        let feats: Vec<SimplexPoint> = (0..n).map(|_| random_simplex(f, &mut r)).collect();
        let p = predict_distributions(&stack, &feats).unwrap();
        for row in p.rows() {
            prop_assert!((row.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        let hist: Vec<usize> = (0..r.random_range(0..6)).map(|_| r.random_range(0..k)).collect();
        let order = r.random_range(1..4);
        let ar = autoregressive_features(&hist, order, k).unwrap();
        prop_assert!((ar.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn perm_error_is_bounded(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let (wmax, pmax) = (r.random_range(0.1..3.0), r.random_range(0.1..3.0));
        let batch = JobBatch::new(
            (0..n).map(|_| r.random_range(0.0..=wmax)).collect(),
            (0..n).map(|_| r.random_range(0.0..=pmax)).collect(),
        )
        .unwrap();
        let mut sigma: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(sigma.as_mut_slice(), &mut r);
        let x = PermutationMatrix::from_columns(sigma).unwrap();
        let e = perm_error(&x, &batch).unwrap();
        prop_assert!(e >= 0.0 && e <= wmax * pmax * n as f64 + 1e-12);
    }

    #[test]
    fn discrete_bound_at_full_tradeoff(n in 2u32..60, b in 1u32..60) {
        let s = SkiSeason::new(f64::from(n), f64::from(b)).unwrap();
        let opt = s.optimum();
        let e = std::f64::consts::E;
        for x in 1..=n + 1 {
            let v = discrete_bound(x, 1.0, &s).unwrap();
            prop_assert!(v >= opt - 1e-12);
            prop_assert!(v <= opt / (1.0 - 1.0 / e) + 1.0);
        }
    }
}

/// `Tr((U ⊙ X)ᵀ X w pᵀ)` evaluated with dense matrices and an arbitrary mask.
fn dense_trace(x: &[Vec<f64>], mask: &[Vec<f64>], w: &[f64], p: &[f64]) -> f64 {
    let n = x.len();
    let xw: Vec<f64> = (0..n).map(|i| (0..n).map(|j| x[i][j] * w[j]).sum()).collect();
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            // (U⊙X)ᵀ[j][i] · (X w pᵀ)[i][j]
            tr += mask[i][j] * x[i][j] * xw[i] * p[j];
        }
    }
    tr
}

fn upper_mask(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i <= j { 1.0 } else { 0.0 }).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn perm_error_matches_dense_trace(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let w: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let p: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let batch = JobBatch::new(w.clone(), p.clone()).unwrap();
        for x in all_permutations(n).unwrap() {
            let dense = dense_trace(&x.to_dense(), &upper_mask(n), &w, &p);
            prop_assert!((perm_error(&x, &batch).unwrap() - dense).abs() <= 1e-12);
        }
    }

    /// Relabeling jobs by `π` while conjugating both the order and the mask
    /// leaves the trace unchanged. With the mask held fixed it does not (the
    /// mask encodes positions), so the mask moves with the labels here.
    #[test]
    fn perm_error_relabeling(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let w: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let p: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let mut pi: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(pi.as_mut_slice(), &mut r);
        let mut sigma: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(sigma.as_mut_slice(), &mut r);
        let x = PermutationMatrix::from_columns(sigma).unwrap().to_dense();
        // (Pπ M Pπᵀ)[π(i)][π(j)] = M[i][j]
        let conj = |m: &[Vec<f64>]| {
            let mut out = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    out[pi[i]][pi[j]] = m[i][j];
                }
            }
            out
        };
        let mut w2 = vec![0.0; n];
        let mut p2 = vec![0.0; n];
        for i in 0..n {
            w2[pi[i]] = w[i];
            p2[pi[i]] = p[i];
        }
        let before = dense_trace(&x, &upper_mask(n), &w, &p);
        let after = dense_trace(&conj(&x), &conj(&upper_mask(n)), &w2, &p2);
        prop_assert!((before - after).abs() <= 1e-12);
        // the relabeled order is still a permutation matrix
        prop_assert!(PermutationMatrix::from_dense(&conj(&x)).is_ok());
    }

    #[test]
    fn warm_start_keeps_objective_and_duals_certify(seed in any::<u64>(), side in 1usize..7) {
        let mut r = rng(seed);
        let inst = if r.random_bool(0.5) {
            BipartiteInstance::random_complete(side, 30, &mut r)
        } else {
            BipartiteInstance::random_sparse(side, 30, 0.4, &mut r)
        };
        let cold = hungarian_solve(&inst).unwrap();
        let pred: Vec<f64> = (0..2 * side).map(|_| r.random_range(-40.0..40.0)).collect();
        let warm = warmstart_solve(&inst, &pred).unwrap();
        prop_assert_eq!(warm.objective, cold.objective);
        prop_assert_eq!(inst.max_violation(&warm.optimal_duals), 0);
        prop_assert_eq!(warm.optimal_duals.iter().sum::<i64>(), warm.objective);

        let b: Vec<u32> = {
            let mut left: Vec<u32> = (0..side).map(|_| r.random_range(1..=3)).collect();
            let total: u32 = left.iter().sum();
            // spread the same total over the right side, one unit at a time
            let mut right = vec![0u32; side];
            for u in 0..total {
                right[(u as usize) % side] += 1;
            }
            left.extend(right);
            left
        };
        if let Ok(report) = b_matching_solve(&BipartiteInstance::random_complete(side, 30, &mut r), &b, &vec![0.0; 2 * side]) {
            let weighted: i64 = report.optimal_duals.iter().zip(&b).map(|(x, &d)| x * i64::from(d)).sum();
            prop_assert_eq!(weighted, report.objective);
        }
    }

    #[test]
    fn best_l1_point_beats_grid(seed in any::<u64>(), t in 1usize..30) {
        let mut r = rng(seed);
        let targets: Vec<Vec<f64>> = (0..t).map(|_| vec![r.random_range(-3.0..3.0)]).collect();
        let weights: Vec<Vec<f64>> = (0..t).map(|_| vec![r.random_range(0.0..2.0)]).collect();
        let domain = BoxDomain::symmetric(1, 2.0).unwrap();
        let (_, best) = best_in_hindsight_l1(&targets, Some(&weights), &domain).unwrap();
        let grid = (0..=4000)
            .map(|i| -2.0 + i as f64 * 1e-3)
            .map(|x| targets.iter().zip(&weights).map(|(tg, w)| w[0] * (x - tg[0]).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(best <= grid + 1e-9);
        prop_assert!(grid - best <= 1e-3 * weights.iter().map(|w| w[0]).sum::<f64>() + 1e-9);
    }

    #[test]
    fn offline_opt_beats_sampled_trajectories(seed in any::<u64>(), n in 1usize..10, k in 2usize..5) {
        let mut r = rng(seed);
        let metric = MetricSpace::random_planar(k, &mut r);
        let requests: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let problem = MigrationProblem::new(requests.clone(), 2.5, 1).unwrap();
        let opt = offline_opt(&metric, &problem).unwrap();
        for _ in 0..50 {
            let states: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
            prop_assert!(opt.total_cost <= trajectory_cost(&metric, 2.5, &states, &requests) + 1e-9);
        }
    }

    #[test]
    fn fractional_assignment_respects_optimum(seed in any::<u64>(), m in 1usize..5) {
        let mut r = rng(seed);
        let planted: Vec<f64> = (0..m).map(|_| r.random_range(0.2..5.0)).collect();
        let inst = AssignmentInstance::planted(planted.clone(), SimplexPoint::uniform(1), 8, &mut r).unwrap();
        let opt = offline_fractional_opt(&inst).unwrap();
        let planted_span = fractional_assign(&inst, &planted).unwrap();
        prop_assert!((planted_span - opt).abs() <= 1e-6 * opt.max(1.0));
        let other: Vec<f64> = (0..m).map(|_| r.random_range(0.2..5.0)).collect();
        prop_assert!(fractional_assign(&inst, &other).unwrap() >= opt * (1.0 - 1e-9));
    }

    #[test]
    fn round_robin_ratio_within_bound(seed in any::<u64>(), n in 1usize..12, lambda in 0.01f64..0.99) {
        let mut r = rng(seed);
        let truth: Vec<f64> = (0..n).map(|_| r.random_range(1.0..10.0)).collect();
        let pred: Vec<f64> = truth.iter().map(|s| (s + r.random_range(-3.0..3.0)).max(0.01)).collect();
        let inst = RoundRobinInstance::new(truth.clone(), pred).unwrap();
        let ratio = rr_simulate(&inst, lambda).unwrap();
        prop_assert!(spt_total_completion(&truth) > 0.0);
        prop_assert!(ratio >= 1.0 - 1e-9);
        prop_assert!(ratio <= rr_bound(lambda, inst.eta(), n).unwrap() + 1e-6);
    }

    #[test]
    fn logit_subgradient_matches_finite_differences(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let w: Vec<f64> = (0..m).map(|_| r.random_range(0.1..10.0)).collect();
        let x: Vec<f64> = (0..m).map(|_| r.random_range(-3.0..3.0)).collect();
        let target: Vec<f64> = w.iter().map(|v| v.ln()).collect();
        let mut gaps: Vec<f64> = x.iter().zip(&target).map(|(a, b)| (a - b).abs()).collect();
        gaps.sort_by(f64::total_cmp);
        // skip near-ties where the loss is not differentiable
        prop_assume!(m == 1 || gaps[m - 1] - gaps[m - 2] > 1e-3);
        prop_assume!(gaps[m - 1] > 1e-3);
        let g = linf_subgradient(&x, &target).unwrap();
        let h = 1e-7;
        for i in 0..m {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            let fd = (logit_loss(&xp, &w).unwrap() - logit_loss(&xm, &w).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-6, "coordinate {}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn continuous_bound_tradeoff_shape(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = SkiSeason::new(r.random_range(1.1..30.0), r.random_range(0.5..20.0)).unwrap();
        let x = r.random_range(0.0..30.0);
        let e = std::f64::consts::E;
        let u = if s.days <= x { s.days } else { s.buy + x };
        let robust = |l: f64| e * s.optimum() / ((e - 1.0) * l);
        // the consistency branch wins below the crossover and the robust one above
        let lam: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        let crossover = lam.iter().copied().find(|&l| u / (1.0 - l) >= robust(l));
        for &l in &lam {
            let v = continuous_bound(x, l, &s).unwrap();
            match crossover {
                Some(c) if l >= c => prop_assert!((v - robust(l)).abs() <= 1e-9 * v.max(1.0)),
                _ => prop_assert!((v - u / (1.0 - l)).abs() <= 1e-9 * v.max(1.0)),
            }
        }
        if let Some(c) = crossover {
            // both branches agree at the crossing to grid resolution
            let prev = c - 1e-3;
            prop_assert!(u / (1.0 - prev) <= robust(prev));
        }
    }
}

#[test]
fn metric_rejects_triangle_violations() {
    let rows = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
    assert!(MetricSpace::new(rows).is_err());
    let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
    assert!(MetricSpace::new(asym).is_err());
    let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
    assert!(MetricSpace::new(neg).is_err());
    let mut r = rng(4);
    for _ in 0..100 {
        let m = MetricSpace::random_planar(5, &mut r);
        let (i, j, k) = (r.random_range(0..5), r.random_range(0..5), r.random_range(0..5));
        let mut rows: Vec<Vec<f64>> = (0..5).map(|a| (0..5).map(|b| m.distance(a, b)).collect()).collect();
        if i != k && i != j && j != k {
            // push one side past the sum of the other two
            let d = rows[i][j] + rows[j][k] + 0.5;
            rows[i][k] = d;
            rows[k][i] = d;
            assert!(MetricSpace::new(rows).is_err());
        }
    }
}
