//! Perfect b-matching by node splitting.
//!
//! Node `v` with demand `b_v` becomes `b_v` copies that share its predicted
//! dual; copies of adjacent nodes are joined pairwise. After solving, matched
//! copy edges are folded back onto the original edges. Optimal duals for the
//! original nodes are read off shortest-path distances in the residual graph of
//! the folded solution, which certifies optimality through complementary
//! slackness.

use crate::error::{check_dim, Error, Result};

use super::instance::{BipartiteInstance, Edge};
use super::rounding::round_to_integer;
use super::solver::{repair_duals, solve_from_duals, SolveReport};

/// Checks length and the balance `Σ_left b = Σ_right b`.
pub fn validate_demand(instance: &BipartiteInstance, demand: &[u32]) -> Result<()> {
    check_dim(instance.n(), demand.len())?;
    let left: u64 = demand[..instance.n_left()].iter().map(|&b| u64::from(b)).sum();
    let right: u64 = demand[instance.n_left()..].iter().map(|&b| u64::from(b)).sum();
    if left != right {
        return Err(Error::Infeasible(format!(
            "unbalanced demand: left side {left}, right side {right}"
        )));
    }
    Ok(())
}

pub fn b_matching_solve(
    instance: &BipartiteInstance,
    demand: &[u32],
    predicted: &[f64],
) -> Result<SolveReport> {
    validate_demand(instance, demand)?;
    check_dim(instance.n(), predicted.len())?;
    let nl = instance.n_left();
    let (b_left, b_right) = demand.split_at(nl);

    // first copy index of every original node on its side
    let offsets = |b: &[u32]| {
        let mut acc = 0usize;
        b.iter()
            .map(|&k| {
                let start = acc;
                acc += k as usize;
                start
            })
            .collect::<Vec<_>>()
    };
    let (off_l, off_r) = (offsets(b_left), offsets(b_right));
    let copies_l: usize = b_left.iter().map(|&b| b as usize).sum();
    let copies_r: usize = b_right.iter().map(|&b| b as usize).sum();

    let mut split_edges = Vec::new();
    let mut origin = Vec::new();
    for (i, e) in instance.edges().iter().enumerate() {
        for a in 0..b_left[e.left] as usize {
            for c in 0..b_right[e.right] as usize {
                split_edges.push(Edge {
                    left: off_l[e.left] + a,
                    right: off_r[e.right] + c,
                    cost: e.cost,
                });
                origin.push(i);
            }
        }
    }
    let split = BipartiteInstance::new(copies_l, copies_r, split_edges)?;

    let rounded = round_to_integer(predicted)?;
    let mut split_pred = Vec::with_capacity(split.n());
    for (u, &b) in b_left.iter().enumerate() {
        split_pred.extend(std::iter::repeat_n(rounded[u], b as usize));
    }
    for (v, &b) in b_right.iter().enumerate() {
        split_pred.extend(std::iter::repeat_n(rounded[nl + v], b as usize));
    }
    let start = repair_duals(&split, &split_pred)?;
    let report = solve_from_duals(&split, start)?;

    let mut matching: Vec<usize> = report.matching.iter().map(|&i| origin[i]).collect();
    matching.sort_unstable();

    let optimal_duals = if demand.iter().all(|&b| b == 1) {
        report.optimal_duals
    } else {
        residual_duals(instance, &matching)?
    };
    Ok(SolveReport {
        matching,
        objective: report.objective,
        optimal_duals,
        iterations: report.iterations,
    })
}

/// Bellman-Ford potentials on the residual graph: every edge may be pushed
/// left→right at cost `c`, used edges may be undone right→left at cost `−c`.
/// With `d` the distances from a virtual source, `x_u = −d_u` and `x_v = d_v`
/// are feasible and tight on every used edge.
fn residual_duals(instance: &BipartiteInstance, matching: &[usize]) -> Result<Vec<i64>> {
    let n = instance.n();
    let mut used = vec![false; instance.edges().len()];
    for &i in matching {
        used[i] = true;
    }
    let mut arcs = Vec::new();
    for (i, e) in instance.edges().iter().enumerate() {
        let v = instance.right_node(e.right);
        arcs.push((e.left, v, e.cost));
        if used[i] {
            arcs.push((v, e.left, -e.cost));
        }
    }
    let mut dist = vec![0i64; n];
    for round in 0..=n {
        let mut changed = false;
        for &(a, b, w) in &arcs {
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == n {
            return Err(Error::Infeasible("negative residual cycle: b-matching not optimal".into()));
        }
    }
    let nl = instance.n_left();
    Ok(dist
        .iter()
        .enumerate()
        .map(|(i, &d)| if i < nl { -d } else { d })
        .collect())
}
