//! Dinic's max-flow and the offline fractional makespan it certifies.

use std::collections::VecDeque;

use super::assignment::AssignmentInstance;
use crate::error::Result;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

/// Residual network for real capacities.
#[derive(Debug, Clone)]
pub struct MaxFlow {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-12;

impl MaxFlow {
    pub fn new(nodes: usize) -> Self {
        MaxFlow {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    pub fn run(&mut self, source: usize, sink: usize) -> f64 {
        let n = self.out.len();
        let mut total = 0.0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &a in &self.out[u] {
                    let arc = &self.arcs[a];
                    if arc.cap > EPS && level[arc.to] == usize::MAX {
                        level[arc.to] = level[u] + 1;
                        queue.push_back(arc.to);
                    }
                }
            }
            if level[sink] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; n];
            loop {
                let pushed = self.push(source, sink, f64::INFINITY, &level, &mut next);
                if pushed <= EPS {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn push(&mut self, u: usize, sink: usize, limit: f64, level: &[usize], next: &mut [usize]) -> f64 {
        if u == sink {
            return limit;
        }
        while next[u] < self.out[u].len() {
            let a = self.out[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > EPS && level[to] == level[u] + 1 {
                let got = self.push(to, sink, limit.min(cap), level, next);
                if got > EPS {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0.0
    }
}

/// Whether every job fits fractionally when each machine has capacity `span`.
fn feasible(instance: &AssignmentInstance, span: f64) -> bool {
    let jobs = instance.jobs();
    let m = instance.machines();
    let (source, sink) = (0, 1);
    let mut net = MaxFlow::new(2 + jobs.len() + m);
    for (j, job) in jobs.iter().enumerate() {
        net.add_arc(source, 2 + j, job.size);
        for &k in &job.allowed {
            net.add_arc(2 + j, 2 + jobs.len() + k, f64::INFINITY);
        }
    }
    for k in 0..m {
        net.add_arc(2 + jobs.len() + k, sink, span);
    }
    let total = instance.total_size();
    net.run(source, sink) >= total * (1.0 - 1e-12) - 1e-12
}

/// Minimum fractional makespan by bisection on the makespan with a max-flow
/// feasibility test, to relative precision `1e-9`.
pub fn offline_fractional_opt(instance: &AssignmentInstance) -> Result<f64> {
    let total = instance.total_size();
    let mut lo = total / instance.machines() as f64;
    for job in instance.jobs() {
        lo = lo.max(job.size / job.allowed.len() as f64);
    }
    let mut hi = total;
    if feasible(instance, lo) {
        return Ok(lo);
    }
    while hi - lo > 1e-9 * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if feasible(instance, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
