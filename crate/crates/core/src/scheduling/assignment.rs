use std::path::Path;

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::learners::SimplexPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub size: f64,
    /// Machines the job may run on (nonempty, no duplicates).
    pub allowed: Vec<usize>,
}

/// Restricted-assignment instance with its planted good weights and features.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentInstance {
    machines: usize,
    jobs: Vec<Job>,
    good_weights: Vec<f64>,
    features: SimplexPoint,
}

impl AssignmentInstance {
    pub fn new(machines: usize, jobs: Vec<Job>, good_weights: Vec<f64>, features: SimplexPoint) -> Result<Self> {
        if machines == 0 {
            return Err(Error::invalid("need at least one machine"));
        }
        check_dim(machines, good_weights.len())?;
        if good_weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("machine weights must be positive and finite"));
        }
        for (i, job) in jobs.iter().enumerate() {
            if !(job.size > 0.0) || !job.size.is_finite() {
                return Err(Error::invalid(format!("job {i} has non-positive size")));
            }
            if job.allowed.is_empty() {
                return Err(Error::invalid(format!("job {i} has no allowed machine")));
            }
            let mut seen = vec![false; machines];
            for &k in &job.allowed {
                if k >= machines || std::mem::replace(&mut seen[k], true) {
                    return Err(Error::invalid(format!("job {i} lists machine {k} twice or out of range")));
                }
            }
        }
        Ok(AssignmentInstance {
            machines,
            jobs,
            good_weights,
            features,
        })
    }

    /// Random jobs plus single-machine filler jobs that equalize every
    /// machine's load when jobs are split proportionally to `weights`; the
    /// planted weights then attain the lower bound `total size / m`.
    pub fn planted<R: Rng + ?Sized>(
        weights: Vec<f64>,
        features: SimplexPoint,
        jobs: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let m = weights.len();
        let mut list = Vec::with_capacity(jobs + m);
        for _ in 0..jobs {
            let mut allowed: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
            if allowed.is_empty() {
                allowed.push(rng.random_range(0..m));
            }
            list.push(Job {
                size: rng.random_range(0.5..2.0),
                allowed,
            });
        }
        let loads = proportional_loads(m, &list, &weights);
        let top = loads.iter().cloned().fold(0.0, f64::max);
        for (k, load) in loads.iter().enumerate() {
            let gap = top - load;
            if gap > 1e-12 {
                list.push(Job {
                    size: gap,
                    allowed: vec![k],
                });
            }
        }
        AssignmentInstance::new(m, list, weights, features)
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn good_weights(&self) -> &[f64] {
        &self.good_weights
    }

    pub fn features(&self) -> &SimplexPoint {
        &self.features
    }

    pub fn total_size(&self) -> f64 {
        self.jobs.iter().map(|j| j.size).sum()
    }
}

fn proportional_loads(machines: usize, jobs: &[Job], weights: &[f64]) -> Vec<f64> {
    let mut loads = vec![0.0; machines];
    for job in jobs {
        let total: f64 = job.allowed.iter().map(|&k| weights[k]).sum();
        for &k in &job.allowed {
            loads[k] += job.size * weights[k] / total;
        }
    }
    loads
}

/// Splits every job across its allowed machines in proportion to `weights`
/// and returns the largest machine load.
pub fn fractional_assign(instance: &AssignmentInstance, weights: &[f64]) -> Result<f64> {
    check_dim(instance.machines, weights.len())?;
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::invalid("machine weights must be positive and finite"));
    }
    Ok(proportional_loads(instance.machines, &instance.jobs, weights)
        .into_iter()
        .fold(0.0, f64::max))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

fn parse_reals(line: &str, path: &Path, number: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, number, format!("expected a number, found {t:?}"))))
        .collect()
}

/// `m f_dim`, the weight line, the feature line, then `size allowed…` per job.
pub fn read_assignment(path: &Path) -> Result<AssignmentInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (n1, header) = lines.next().ok_or_else(|| parse_err(path, 0, "empty instance file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, n1, format!("expected integer, found {t:?}"))))
        .collect::<Result<_>>()?;
    let [m, f_dim] = dims[..] else {
        return Err(parse_err(path, n1, "header must be `m f_dim`"));
    };
    let (n2, wline) = lines.next().ok_or_else(|| parse_err(path, n1, "missing weight line"))?;
    let weights = parse_reals(wline, path, n2)?;
    let (n3, fline) = lines.next().ok_or_else(|| parse_err(path, n2, "missing feature line"))?;
    let features = parse_reals(fline, path, n3)?;
    if features.len() != f_dim {
        return Err(parse_err(path, n3, format!("expected {f_dim} features")));
    }
    let features = SimplexPoint::new(features).map_err(|e| parse_err(path, n3, e.to_string()))?;
    let mut jobs = Vec::new();
    for (n, line) in lines {
        let vals = parse_reals(line, path, n)?;
        let Some((&size, rest)) = vals.split_first() else { continue };
        let allowed = rest
            .iter()
            .map(|&v| {
                if v.fract() == 0.0 && v >= 0.0 {
                    Ok(v as usize)
                } else {
                    Err(parse_err(path, n, format!("machine index {v} is not an integer")))
                }
            })
            .collect::<Result<_>>()?;
        jobs.push(Job { size, allowed });
    }
    AssignmentInstance::new(m, jobs, weights, features).map_err(|e| parse_err(path, 1, e.to_string()))
}
