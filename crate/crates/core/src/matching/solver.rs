//! Hungarian method with arbitrary feasible starting duals.
//!
//! Each phase grows a shortest-path tree from one free left node over reduced
//! costs `c_uv − x_u − x_v ≥ 0` (Dijkstra), shifts the duals of the settled
//! nodes so the path becomes tight, and augments. `iterations` counts every
//! distinct positive dual adjustment plus every augmentation; the maximum
//! matching already available on tight edges at the starting duals is free.

use crate::error::{check_dim, Error, Result};

use super::instance::BipartiteInstance;
use super::rounding::round_to_integer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    /// Indices into the instance's edge list, one per matched unit (an edge
    /// used twice in a b-matching appears twice).
    pub matching: Vec<usize>,
    pub objective: i64,
    /// Optimal duals, left nodes first.
    pub optimal_duals: Vec<i64>,
    pub iterations: usize,
}

/// Cold-start solve from all-zero duals, feasible because costs are nonnegative.
pub fn hungarian_solve(instance: &BipartiteInstance) -> Result<SolveReport> {
    solve_from_duals(instance, vec![0; instance.n()])
}

/// Restores `x_u + x_v ≤ c_uv` by lowering the left endpoint of each violated
/// edge by its violation, scanning edges in order.
pub fn repair_duals(instance: &BipartiteInstance, duals: &[i64]) -> Result<Vec<i64>> {
    check_dim(instance.n(), duals.len())?;
    let mut x = duals.to_vec();
    for e in instance.edges() {
        let v = instance.right_node(e.right);
        let violation = x[e.left] + x[v] - e.cost;
        if violation > 0 {
            x[e.left] -= violation;
        }
    }
    Ok(x)
}

/// Rounds and repairs a real-valued prediction, then solves from it.
pub fn warmstart_solve(instance: &BipartiteInstance, predicted: &[f64]) -> Result<SolveReport> {
    check_dim(instance.n(), predicted.len())?;
    let rounded = round_to_integer(predicted)?;
    let duals = repair_duals(instance, &rounded)?;
    solve_from_duals(instance, duals)
}

const UNSEEN: i64 = i64::MAX;

/// Primal-dual solve from feasible integer duals.
pub fn solve_from_duals(instance: &BipartiteInstance, mut duals: Vec<i64>) -> Result<SolveReport> {
    check_dim(instance.n(), duals.len())?;
    if instance.max_violation(&duals) > 0 {
        return Err(Error::invalid("starting duals violate an edge constraint"));
    }
    let (nl, nr) = (instance.n_left(), instance.n_right());
    if nl != nr {
        return Err(Error::Infeasible(format!(
            "no perfect matching between {nl} left and {nr} right nodes"
        )));
    }
    let edges = instance.edges();
    let mut adj = vec![Vec::new(); nl];
    for (i, e) in edges.iter().enumerate() {
        adj[e.left].push(i);
    }
    let reduced = |duals: &[i64], i: usize| {
        let e = edges[i];
        e.cost - duals[e.left] - duals[nl + e.right]
    };

    // matched edge per left / right node
    let mut mate_l: Vec<Option<usize>> = vec![None; nl];
    let mut mate_r: Vec<Option<usize>> = vec![None; nr];

    // Kuhn's algorithm on the tight subgraph
    for root in 0..nl {
        let mut seen = vec![false; nr];
        tight_augment(root, &adj, edges, &duals, nl, &mut seen, &mut mate_l, &mut mate_r);
    }

    let mut iterations = 0;
    let mut dist_l = vec![UNSEEN; nl];
    let mut dist_r = vec![UNSEEN; nr];
    let mut done_l = vec![false; nl];
    let mut done_r = vec![false; nr];
    let mut parent_r: Vec<usize> = vec![usize::MAX; nr];

    for root in 0..nl {
        if mate_l[root].is_some() {
            continue;
        }
        dist_l.fill(UNSEEN);
        dist_r.fill(UNSEEN);
        done_l.fill(false);
        done_r.fill(false);
        dist_l[root] = 0;
        done_l[root] = true;
        let mut frontier = vec![root];
        let mut level = 0;
        let target = loop {
            for u in frontier.drain(..) {
                for &i in &adj[u] {
                    let v = edges[i].right;
                    if done_r[v] {
                        continue;
                    }
                    let d = dist_l[u] + reduced(&duals, i);
                    if d < dist_r[v] {
                        dist_r[v] = d;
                        parent_r[v] = i;
                    }
                }
            }
            let next = (0..nr)
                .filter(|&v| !done_r[v] && dist_r[v] != UNSEEN)
                .min_by_key(|&v| (dist_r[v], v));
            let Some(v) = next else {
                return Err(Error::Infeasible(format!(
                    "left node {root} cannot be matched: no perfect matching"
                )));
            };
            done_r[v] = true;
            if dist_r[v] > level {
                level = dist_r[v];
                iterations += 1;
            }
            match mate_r[v] {
                None => break v,
                Some(i) => {
                    let u = edges[i].left;
                    dist_l[u] = dist_r[v];
                    done_l[u] = true;
                    frontier.push(u);
                }
            }
        };

        let d = dist_r[target];
        for u in 0..nl {
            if done_l[u] {
                duals[u] += d - dist_l[u];
            }
        }
        for v in 0..nr {
            if done_r[v] {
                duals[nl + v] -= d - dist_r[v];
            }
        }

        let mut v = target;
        loop {
            let i = parent_r[v];
            let u = edges[i].left;
            let previous = mate_l[u];
            mate_l[u] = Some(i);
            mate_r[v] = Some(i);
            match previous {
                Some(j) => v = edges[j].right,
                None => break,
            }
        }
        iterations += 1;
    }

    let matching: Vec<usize> = mate_l.iter().map(|m| m.expect("all left nodes matched")).collect();
    let objective = matching.iter().map(|&i| edges[i].cost).sum();
    debug_assert_eq!(objective, duals.iter().sum::<i64>());
    Ok(SolveReport {
        matching,
        objective,
        optimal_duals: duals,
        iterations,
    })
}

#[allow(clippy::too_many_arguments)]
fn tight_augment(
    u: usize,
    adj: &[Vec<usize>],
    edges: &[super::instance::Edge],
    duals: &[i64],
    nl: usize,
    seen: &mut [bool],
    mate_l: &mut [Option<usize>],
    mate_r: &mut [Option<usize>],
) -> bool {
    for &i in &adj[u] {
        let e = edges[i];
        if e.cost - duals[e.left] - duals[nl + e.right] != 0 || seen[e.right] {
            continue;
        }
        seen[e.right] = true;
        let free = match mate_r[e.right] {
            None => true,
            Some(j) => tight_augment(edges[j].left, adj, edges, duals, nl, seen, mate_l, mate_r),
        };
        if free {
            mate_l[u] = Some(i);
            mate_r[e.right] = Some(i);
            return true;
        }
    }
    false
}
