use std::path::Path;

use crate::error::{check_dim, Error, Result};

/// A permutation matrix stored as its column map: row `i` has its 1 in
/// column `sigma[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    sigma: Vec<usize>,
}

impl PermutationMatrix {
    pub fn identity(n: usize) -> Self {
        PermutationMatrix { sigma: (0..n).collect() }
    }

    pub fn from_columns(sigma: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; sigma.len()];
        for &c in &sigma {
            if c >= sigma.len() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::invalid(format!("{sigma:?} is not a permutation")));
            }
        }
        Ok(PermutationMatrix { sigma })
    }

    /// Validates a dense 0/1 matrix: square, exactly one 1 per row and column.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut sigma = Vec::with_capacity(n);
        for row in rows {
            check_dim(n, row.len())?;
            if row.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::invalid("permutation matrix entries must be 0 or 1"));
            }
            let ones: Vec<usize> = row.iter().enumerate().filter(|(_, &v)| v == 1.0).map(|(j, _)| j).collect();
            let [c] = ones[..] else {
                return Err(Error::invalid("each row needs exactly one 1"));
            };
            sigma.push(c);
        }
        Self::from_columns(sigma)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.sigma.len();
        self.sigma
            .iter()
            .map(|&c| (0..n).map(|j| if j == c { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn columns(&self) -> &[usize] {
        &self.sigma
    }
}

/// Weights and processing times of `n` jobs.
#[derive(Debug, Clone, PartialEq)]
pub struct JobBatch {
    weights: Vec<f64>,
    processing: Vec<f64>,
}

impl JobBatch {
    pub fn new(weights: Vec<f64>, processing: Vec<f64>) -> Result<Self> {
        check_dim(weights.len(), processing.len())?;
        if weights.iter().chain(&processing).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("job weights and processing times must be finite and nonnegative"));
        }
        Ok(JobBatch { weights, processing })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn processing(&self) -> &[f64] {
        &self.processing
    }
}

/// Which part of the upper triangle the mask `U` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Triangle {
    /// Ones on and above the diagonal.
    #[default]
    Inclusive,
    /// Ones strictly above the diagonal.
    Strict,
}

/// `Tr((U ⊙ X)ᵀ X w pᵀ)` with the inclusive mask.
pub fn perm_error(x: &PermutationMatrix, batch: &JobBatch) -> Result<f64> {
    perm_error_with(x, batch, Triangle::Inclusive)
}

/// Only entries `(i, σ(i))` of `U ⊙ X` are nonzero, and row `i` of `X w` is
/// `w_{σ(i)}`, so the trace reduces to `Σ_{i : U[i, σ(i)] = 1} w_{σ(i)} p_{σ(i)}`.
pub fn perm_error_with(x: &PermutationMatrix, batch: &JobBatch, mask: Triangle) -> Result<f64> {
    check_dim(x.len(), batch.len())?;
    Ok(x.sigma
        .iter()
        .enumerate()
        .filter(|&(i, &c)| match mask {
            Triangle::Inclusive => i <= c,
            Triangle::Strict => i < c,
        })
        .map(|(_, &c)| batch.weights[c] * batch.processing[c])
        .sum())
}

/// Batch file: groups of three lines, `n`, then `n` weights, then `n`
/// processing times.
pub fn read_batches(path: &Path) -> Result<Vec<JobBatch>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_batches(&text, path)
}

/// [`read_batches`] on text already in memory; `path` labels errors.
pub fn parse_batches(text: &str, path: &Path) -> Result<Vec<JobBatch>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let numbers = |(line, text): (usize, &str)| -> Result<Vec<f64>> {
        text.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, format!("expected a number, found {t:?}"))))
            .collect()
    };
    let mut out = Vec::new();
    for group in lines.chunks(3) {
        let [head, w, p] = group else {
            return Err(err(group[0].0, "incomplete batch: expected `n`, weights, processing".into()));
        };
        let n: usize = head.1.trim().parse().map_err(|_| err(head.0, format!("expected a job count, found {:?}", head.1.trim())))?;
        let (wv, pv) = (numbers(*w)?, numbers(*p)?);
        if wv.len() != n {
            return Err(err(w.0, format!("expected {n} weights, found {}", wv.len())));
        }
        if pv.len() != n {
            return Err(err(p.0, format!("expected {n} processing times, found {}", pv.len())));
        }
        out.push(JobBatch::new(wv, pv).map_err(|e| err(w.0, e.to_string()))?);
    }
    Ok(out)
}
