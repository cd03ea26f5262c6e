use crate::error::{check_dim, check_finite, Error, Result};

use super::BoxDomain;

/// One step of projected online subgradient descent:
/// `Π_domain(point − step_size · subgrad)`.
pub fn ogd_step(
    point: &[f64],
    subgrad: &[f64],
    step_size: f64,
    domain: &BoxDomain,
) -> Result<Vec<f64>> {
    check_dim(domain.dim(), point.len())?;
    check_dim(domain.dim(), subgrad.len())?;
    check_finite(subgrad, "subgradient")?;
    if !(step_size > 0.0) {
        return Err(Error::invalid("step size must be positive"));
    }
    let mut next: Vec<f64> = point
        .iter()
        .zip(subgrad)
        .map(|(x, g)| x - step_size * g)
        .collect();
    domain.project_in_place(&mut next);
    Ok(next)
}
