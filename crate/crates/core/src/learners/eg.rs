use crate::error::{check_dim, Error, Result};

use super::SimplexPoint;

/// Exponentiated subgradient step `x ∝ x ⊙ exp(−α g)`.
///
/// The exponent is shifted by the smallest subgradient entry on the support,
/// which leaves the normalized result unchanged and keeps the largest factor at
/// one. Coordinates with zero weight stay at zero.
pub fn eg_step(dist: &SimplexPoint, subgrad: &[f64], step_size: f64) -> Result<SimplexPoint> {
    check_dim(dist.dim(), subgrad.len())?;
    if subgrad.iter().any(|g| g.is_nan()) {
        return Err(Error::invalid("subgradient contains NaN"));
    }
    if subgrad.iter().any(|g| g.is_infinite()) {
        return Err(Error::invalid("subgradient contains an infinite entry"));
    }
    if !(step_size >= 0.0) || !step_size.is_finite() {
        return Err(Error::invalid("step size must be finite and nonnegative"));
    }
    let w = dist.weights();
    let shift = w
        .iter()
        .zip(subgrad)
        .filter(|(wi, _)| **wi > 0.0)
        .map(|(_, g)| *g)
        .fold(f64::INFINITY, f64::min);
    let mut next: Vec<f64> = w
        .iter()
        .zip(subgrad)
        .map(|(wi, g)| {
            if *wi > 0.0 {
                wi * (-step_size * (g - shift)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|v| *v /= total);
    Ok(SimplexPoint::from_trusted(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_keeps_uniform() {
        let p = eg_step(&SimplexPoint::uniform(2), &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn ln2_step_halves_the_penalized_weight() {
        let p = eg_step(&SimplexPoint::uniform(2), &[1.0, 0.0], 2f64.ln()).unwrap();
        assert!((p.weights()[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.weights()[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn support_is_preserved() {
        let p = eg_step(&SimplexPoint::one_hot(2, 0), &[5.0, -3.0], 10.0).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0]);
    }

    #[test]
    fn nan_is_rejected() {
        assert!(eg_step(&SimplexPoint::uniform(2), &[f64::NAN, 0.0], 1.0).is_err());
    }

    #[test]
    fn huge_gradients_do_not_underflow_to_zero_mass() {
        let p = eg_step(&SimplexPoint::uniform(3), &[1e6, 2e6, 3e6], 1.0).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0, 0.0]);
    }
}
