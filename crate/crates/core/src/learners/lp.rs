//! Exact hindsight comparators for piecewise-linear convex losses.
//!
//! Every comparator needed outside the separable ℓ1 case minimizes a sum of
//! maxima of affine functions over a polytope. The epigraph reformulation
//! `min Σ_t s_t  s.t.  s_t ≥ a_{t,i}·x + b_{t,i}` is handed to `microlp`.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, SolveOutcome, Variable};

use crate::error::{Error, Result};

/// One affine piece `Σ coef·x[var] + constant`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(i, c)| c * x[*i]).sum::<f64>()
    }
}

/// A round's loss `max_i piece_i(x)`.
pub type MaxAffine = Vec<AffinePiece>;

pub fn eval_max_affine(loss: &MaxAffine, x: &[f64]) -> f64 {
    loss.iter()
        .map(|p| p.eval(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Feasible region: per-variable bounds plus groups of variables that must
/// sum to one (simplex blocks, with nonnegativity supplied by the bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub bounds: Vec<(f64, f64)>,
    pub unit_sum_groups: Vec<Vec<usize>>,
}

/// Minimizes `Σ_t max_i piece_{t,i}(x)` over the polytope. Returns the
/// minimizer and the objective re-evaluated at it.
///
/// Pieces are generated lazily: each round starts with the piece active at the
/// center of the box, and after every solve the most violated piece of each
/// round is added as a cut to the solved program, which the solver re-optimizes
/// from its current basis. The loop ends when no piece exceeds its epigraph
/// variable, at which point the relaxed optimum is optimal for the full problem.
pub fn minimize_sum_of_max_affine(region: &Polytope, losses: &[MaxAffine]) -> Result<(Vec<f64>, f64)> {
    if losses.iter().any(Vec::is_empty) {
        return Err(Error::invalid("max-affine loss without pieces"));
    }
    let center: Vec<f64> = region.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut active: Vec<Vec<usize>> = losses.iter().map(|l| vec![argmax_piece(l, &center)]).collect();

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = region.bounds.iter().map(|b| problem.add_var(0.0, *b)).collect();
    for group in &region.unit_sum_groups {
        let expr: Vec<_> = group.iter().map(|&i| (vars[i], 1.0)).collect();
        problem.add_constraint(expr, ComparisonOp::Eq, 1.0);
    }
    let epis: Vec<Variable> = losses
        .iter()
        .map(|_| problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (t, pieces) in active.iter().enumerate() {
        let (expr, rhs) = cut(&losses[t][pieces[0]], &vars, epis[t]);
        problem.add_constraint(expr, ComparisonOp::Le, rhs);
    }
    let mut solution = into_solution(problem.solve())?;
    loop {
        let x = read_point(&solution, &vars, region);
        let mut cuts = Vec::new();
        for (t, loss) in losses.iter().enumerate() {
            let best = argmax_piece(loss, &x);
            let epi = solution.var_value(epis[t]);
            if loss[best].eval(&x) > epi + 1e-9 * (1.0 + epi.abs()) && !active[t].contains(&best) {
                active[t].push(best);
                cuts.push(cut(&loss[best], &vars, epis[t]));
            }
        }
        if cuts.is_empty() {
            let value = losses.iter().map(|l| eval_max_affine(l, &x)).sum();
            return Ok((x, value));
        }
        for (expr, rhs) in cuts {
            solution = into_solution(solution.add_constraint(expr, ComparisonOp::Le, rhs))?;
        }
    }
}

/// Same minimization with one aggregated cut per iteration (Kelley's method):
/// the program keeps only the region's variables and a single epigraph
/// variable for the whole sum, so it stays small when there are many rounds
/// over few variables. Stops once the best value found is within a relative
/// `1e-9` of the program's lower bound.
pub fn minimize_sum_of_max_affine_aggregated(region: &Polytope, losses: &[MaxAffine]) -> Result<(Vec<f64>, f64)> {
    if losses.iter().any(Vec::is_empty) {
        return Err(Error::invalid("max-affine loss without pieces"));
    }
    let dim = region.bounds.len();
    let linearize = |x: &[f64]| {
        let mut grad = vec![0.0; dim];
        let mut value = 0.0;
        for loss in losses {
            let piece = &loss[argmax_piece(loss, x)];
            value += piece.eval(x);
            for &(i, c) in &piece.terms {
                grad[i] += c;
            }
        }
        (value, grad)
    };
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = region.bounds.iter().map(|b| problem.add_var(0.0, *b)).collect();
    for group in &region.unit_sum_groups {
        let expr: Vec<_> = group.iter().map(|&i| (vars[i], 1.0)).collect();
        problem.add_constraint(expr, ComparisonOp::Eq, 1.0);
    }
    let mut x: Vec<f64> = region.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    if !region.unit_sum_groups.is_empty() {
        // the center need not be feasible; start from any feasible point
        x = read_point(&into_solution(problem.solve())?, &vars, region);
    }
    let epi = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    // F(x) ≥ F(x_k) + g·(x − x_k)  ⇔  g·x − s ≤ g·x_k − F(x_k)
    let kelley_cut = |x: &[f64], value: f64, grad: &[f64]| {
        let mut expr: Vec<_> = vars.iter().zip(grad).map(|(v, g)| (*v, *g)).collect();
        expr.push((epi, -1.0));
        let rhs = grad.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>() - value;
        (expr, rhs)
    };
    let (value, grad) = linearize(&x);
    let (mut best_x, mut best) = (x.clone(), value);
    let (expr, rhs) = kelley_cut(&x, value, &grad);
    problem.add_constraint(expr, ComparisonOp::Le, rhs);
    let mut solution = into_solution(problem.solve())?;
    for _ in 0..MAX_KELLEY_ITERATIONS {
        let lower = solution.var_value(epi);
        if best - lower <= 1e-9 * (1.0 + best.abs()) {
            return Ok((best_x, best));
        }
        x = read_point(&solution, &vars, region);
        let (value, grad) = linearize(&x);
        if value < best {
            best = value;
            best_x = x.clone();
        }
        let (expr, rhs) = kelley_cut(&x, value, &grad);
        solution = into_solution(solution.add_constraint(expr, ComparisonOp::Le, rhs))?;
    }
    Err(Error::Lp(format!("no convergence within {MAX_KELLEY_ITERATIONS} cuts")))
}

const MAX_KELLEY_ITERATIONS: usize = 20_000;

fn argmax_piece(loss: &MaxAffine, x: &[f64]) -> usize {
    let mut best = 0;
    let mut value = f64::NEG_INFINITY;
    for (i, p) in loss.iter().enumerate() {
        let v = p.eval(x);
        if v > value {
            best = i;
            value = v;
        }
    }
    best
}

/// `piece(x) − s ≤ −constant`, with repeated variables merged because the
/// solver rejects them.
fn cut(piece: &AffinePiece, vars: &[Variable], epi: Variable) -> (Vec<(Variable, f64)>, f64) {
    let mut merged = std::collections::BTreeMap::new();
    for &(i, c) in &piece.terms {
        *merged.entry(i).or_insert(0.0) += c;
    }
    let mut expr: Vec<_> = merged.into_iter().map(|(i, c)| (vars[i], c)).collect();
    expr.push((epi, -1.0));
    (expr, -piece.constant)
}

fn into_solution(outcome: std::result::Result<SolveOutcome, microlp::Error>) -> Result<Solution> {
    outcome
        .map_err(|e| Error::Lp(e.to_string()))?
        .into_solution()
        .map_err(|_| Error::Lp("solver interrupted".into()))
}

fn read_point(solution: &Solution, vars: &[Variable], region: &Polytope) -> Vec<f64> {
    vars.iter()
        .zip(&region.bounds)
        .map(|(v, (lo, hi))| solution.var_value(*v).clamp(*lo, *hi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_piece(var: usize, target: f64) -> MaxAffine {
        vec![
            AffinePiece { terms: vec![(var, 1.0)], constant: -target },
            AffinePiece { terms: vec![(var, -1.0)], constant: target },
        ]
    }

    #[test]
    fn absolute_values_give_median() {
        let region = Polytope { bounds: vec![(-10.0, 10.0)], unit_sum_groups: vec![] };
        let losses = vec![abs_piece(0, 1.0), abs_piece(0, 5.0), abs_piece(0, 3.0)];
        let (x, v) = minimize_sum_of_max_affine(&region, &losses).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-9);
        assert!((v - 4.0).abs() < 1e-9);
    }

    #[test]
    fn simplex_picks_cheapest_vertex() {
        let region = Polytope {
            bounds: vec![(0.0, 1.0); 3],
            unit_sum_groups: vec![vec![0, 1, 2]],
        };
        let loss = vec![AffinePiece { terms: vec![(0, 3.0), (1, 1.0), (2, 2.0)], constant: 0.0 }];
        let (x, v) = minimize_sum_of_max_affine(&region, &[loss]).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!((x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn aggregated_cuts_reach_the_same_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        for groups in [vec![], vec![vec![0, 1, 2]]] {
            let (lo, hi) = if groups.is_empty() { (-2.0, 2.0) } else { (0.0, 1.0) };
            let region = Polytope { bounds: vec![(lo, hi); 3], unit_sum_groups: groups };
            let losses: Vec<MaxAffine> = (0..60)
                .map(|_| {
                    (0..4)
                        .map(|_| AffinePiece {
                            terms: (0..3).map(|i| (i, rng.random_range(-1.0..1.0))).collect(),
                            constant: rng.random_range(-1.0..1.0),
                        })
                        .collect()
                })
                .collect();
            let (_, full) = minimize_sum_of_max_affine(&region, &losses).unwrap();
            let (x, agg) = minimize_sum_of_max_affine_aggregated(&region, &losses).unwrap();
            assert!((full - agg).abs() <= 1e-7 * (1.0 + full.abs()), "{full} vs {agg}");
            assert!(x.iter().all(|v| (lo..=hi).contains(v)));
        }
    }
}
