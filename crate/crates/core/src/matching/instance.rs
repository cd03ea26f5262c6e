use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub cost: i64,
}

/// Bipartite graph with nonnegative integer edge costs.
///
/// Nodes are numbered left side first: left `u` is node `u`, right `v` is node
/// `n_left + v`. Dual vectors follow the same layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    n_left: usize,
    n_right: usize,
    edges: Vec<Edge>,
}

impl BipartiteInstance {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            if e.left >= n_left || e.right >= n_right {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for a {n_left}x{n_right} graph",
                    e.left, e.right
                )));
            }
            if e.cost < 0 {
                return Err(Error::invalid("edge costs must be nonnegative"));
            }
        }
        Ok(BipartiteInstance {
            n_left,
            n_right,
            edges,
        })
    }

    /// Complete `side × side` graph from a row-major cost matrix.
    pub fn complete(side: usize, costs: &[i64]) -> Result<Self> {
        if costs.len() != side * side {
            return Err(Error::DimensionMismatch {
                expected: side * side,
                got: costs.len(),
            });
        }
        let edges = (0..side)
            .flat_map(|u| (0..side).map(move |v| (u, v)))
            .map(|(u, v)| Edge {
                left: u,
                right: v,
                cost: costs[u * side + v],
            })
            .collect();
        BipartiteInstance::new(side, side, edges)
    }

    /// Complete graph with i.i.d. uniform costs in `0..=max_cost`.
    pub fn random_complete<R: Rng + ?Sized>(side: usize, max_cost: i64, rng: &mut R) -> Self {
        let costs: Vec<i64> = (0..side * side)
            .map(|_| rng.random_range(0..=max_cost))
            .collect();
        BipartiteInstance::complete(side, &costs).expect("generated costs are valid")
    }

    /// Sparse graph that contains a hidden perfect matching plus each other
    /// pair independently with probability `density`.
    pub fn random_sparse<R: Rng + ?Sized>(side: usize, max_cost: i64, density: f64, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..side).collect();
        perm.shuffle(rng);
        let mut edges = Vec::new();
        for u in 0..side {
            for v in 0..side {
                if perm[u] == v || rng.random_bool(density) {
                    edges.push(Edge {
                        left: u,
                        right: v,
                        cost: rng.random_range(0..=max_cost),
                    });
                }
            }
        }
        BipartiteInstance::new(side, side, edges).expect("generated edges are valid")
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Total node count over both sides.
    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.cost).max().unwrap_or(0)
    }

    pub fn right_node(&self, v: usize) -> usize {
        self.n_left + v
    }

    /// Largest violation `x_u + x_v − c_uv` over all edges (0 if feasible).
    pub fn max_violation(&self, duals: &[i64]) -> i64 {
        self.edges
            .iter()
            .map(|e| duals[e.left] + duals[self.right_node(e.right)] - e.cost)
            .max()
            .unwrap_or(0)
            .max(0)
    }
}
