use crate::error::{check_dim, Error, Result};

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Subgradient of `x ↦ Σ_i w_i |x_i − target_i|` (unit weights when `None`),
/// with `sign(0) = 0`.
pub fn l1_subgradient(x: &[f64], target: &[f64], weights: Option<&[f64]>) -> Result<Vec<f64>> {
    check_dim(x.len(), target.len())?;
    if let Some(w) = weights {
        check_dim(x.len(), w.len())?;
        if w.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid("seminorm weights must be nonnegative"));
        }
    }
    Ok(x.iter()
        .zip(target)
        .enumerate()
        .map(|(i, (a, b))| weights.map_or(1.0, |w| w[i]) * sign(a - b))
        .collect())
}

/// Subgradient of `x ↦ ‖x − target‖_∞`: a signed one-hot at the lowest index
/// attaining the maximum, or zero when `x = target`.
pub fn linf_subgradient(x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    check_dim(x.len(), target.len())?;
    let mut g = vec![0.0; x.len()];
    let mut best = 0.0;
    let mut arg = None;
    for (i, (a, b)) in x.iter().zip(target).enumerate() {
        let d = (a - b).abs();
        if d > best {
            best = d;
            arg = Some(i);
        }
    }
    if let Some(i) = arg {
        g[i] = sign(x[i] - target[i]);
    }
    Ok(g)
}

pub fn l1_distance(x: &[f64], target: &[f64], weights: Option<&[f64]>) -> f64 {
    x.iter()
        .zip(target)
        .enumerate()
        .map(|(i, (a, b))| weights.map_or(1.0, |w| w[i]) * (a - b).abs())
        .sum()
}

pub fn linf_distance(x: &[f64], target: &[f64]) -> f64 {
    x.iter()
        .zip(target)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}
