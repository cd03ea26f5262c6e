use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::learners::TOL;

/// Finite metric space given by its full distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    size: usize,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Validates zero diagonal, symmetry, nonnegativity and every triangle
    /// inequality (up to the shared tolerance).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::invalid("metric space needs at least one point"));
        }
        let mut dist = Vec::with_capacity(size * size);
        for row in &rows {
            if row.len() != size {
                return Err(Error::DimensionMismatch { expected: size, got: row.len() });
            }
            dist.extend_from_slice(row);
        }
        let d = |i: usize, j: usize| dist[i * size + j];
        for i in 0..size {
            if d(i, i) != 0.0 {
                return Err(Error::invalid(format!("nonzero self-distance at point {i}")));
            }
            for j in 0..size {
                if !d(i, j).is_finite() || d(i, j) < 0.0 {
                    return Err(Error::invalid(format!("bad distance d({i},{j}) = {}", d(i, j))));
                }
                if (d(i, j) - d(j, i)).abs() > TOL {
                    return Err(Error::invalid(format!("asymmetric distance between {i} and {j}")));
                }
            }
        }
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    if d(i, k) > d(i, j) + d(j, k) + TOL {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(MetricSpace { size, dist })
    }

    /// Every pair of distinct points at distance 1.
    pub fn uniform(size: usize) -> Self {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        MetricSpace::new(rows).expect("uniform metric is valid")
    }

    /// Euclidean distances between points drawn uniformly from the unit square.
    pub fn random_planar<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Self {
        let pts: Vec<(f64, f64)> = (0..size).map(|_| (rng.random(), rng.random())).collect();
        let mut dist = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    dist[i * size + j] = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                }
            }
        }
        MetricSpace { size, dist }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }
}

/// Request sequence together with the migration cost factor `D > 1` and the
/// window length `γD`.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationProblem {
    requests: Vec<usize>,
    migration_cost: f64,
    window: usize,
}

impl MigrationProblem {
    pub fn new(requests: Vec<usize>, migration_cost: f64, window: usize) -> Result<Self> {
        if !(migration_cost > 1.0) {
            return Err(Error::invalid("migration cost factor must exceed 1"));
        }
        if window == 0 || window > requests.len() {
            return Err(Error::invalid(format!(
                "window {window} must lie in 1..={}",
                requests.len()
            )));
        }
        if window as f64 >= migration_cost {
            return Err(Error::invalid("window / migration cost must be below 1"));
        }
        Ok(MigrationProblem {
            requests,
            migration_cost,
            window,
        })
    }

    pub fn requests(&self) -> &[usize] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn migration_cost(&self) -> f64 {
        self.migration_cost
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// `γ = window / D`.
    pub fn gamma(&self) -> f64 {
        self.window as f64 / self.migration_cost
    }

    pub(crate) fn check_against(&self, metric: &MetricSpace) -> Result<()> {
        if let Some(&bad) = self.requests.iter().find(|&&r| r >= metric.size()) {
            return Err(Error::invalid(format!(
                "request {bad} outside a metric of {} points",
                metric.size()
            )));
        }
        Ok(())
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Metric file: the point count, then the full distance matrix.
pub fn read_metric(path: &Path) -> Result<MetricSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut toks = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, first) = toks.next().ok_or_else(|| parse_err(path, 0, "empty metric file"))?;
    let size: usize = first
        .parse()
        .map_err(|_| parse_err(path, line, format!("expected point count, found {first:?}")))?;
    let mut rows = vec![Vec::with_capacity(size); size];
    for row in rows.iter_mut() {
        for _ in 0..size {
            let (line, tok) = toks
                .next()
                .ok_or_else(|| parse_err(path, 0, "distance matrix is truncated"))?;
            row.push(
                tok.parse()
                    .map_err(|_| parse_err(path, line, format!("expected distance, found {tok:?}")))?,
            );
        }
    }
    if let Some((line, tok)) = toks.next() {
        return Err(parse_err(path, line, format!("trailing token {tok:?}")));
    }
    MetricSpace::new(rows).map_err(|e| parse_err(path, 1, e.to_string()))
}

/// Request file: one point index per line.
pub fn read_requests(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("expected request index, found {:?}", l.trim())))
        })
        .collect()
}
