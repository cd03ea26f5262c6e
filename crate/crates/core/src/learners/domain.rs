use crate::error::{check_dim, check_finite, Error, Result};

use super::TOL;

/// Axis-aligned box `[lower, upper]` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        check_finite(&lower, "box lower bound")?;
        check_finite(&upper, "box upper bound")?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::invalid("box lower bound exceeds upper bound"));
        }
        Ok(BoxDomain { lower, upper })
    }

    /// The cube `[-radius, radius]^dim`.
    pub fn symmetric(dim: usize, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::invalid("box radius must be nonnegative"));
        }
        BoxDomain::new(vec![-radius; dim], vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - TOL && *v <= u + TOL)
    }

    /// Euclidean projection, which for a box is coordinatewise clipping.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn project_in_place(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }
}

/// A probability vector: nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("simplex point must be nonempty"));
        }
        check_finite(&weights, "simplex weights")?;
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid("simplex weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::invalid(format!(
                "simplex weights sum to {total}, not 1"
            )));
        }
        Ok(SimplexPoint { weights })
    }

    /// Normalizes arbitrary nonnegative weights onto the simplex.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        check_finite(&weights, "simplex weights")?;
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid("simplex weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("cannot normalize all-zero weights"));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(SimplexPoint { weights })
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "simplex dimension must be positive");
        SimplexPoint {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn one_hot(dim: usize, index: usize) -> Self {
        assert!(index < dim, "one-hot index out of range");
        let mut weights = vec![0.0; dim];
        weights[index] = 1.0;
        SimplexPoint { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub(crate) fn from_trusted(weights: Vec<f64>) -> Self {
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        SimplexPoint { weights }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_rejects_inverted_bounds() {
        assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn projection_clips() {
        let b = BoxDomain::symmetric(3, 1.0).unwrap();
        assert_eq!(b.project(&[2.0, -0.5, -7.0]).unwrap(), vec![1.0, -0.5, -1.0]);
        assert!(b.project(&[0.0]).is_err());
    }

    #[test]
    fn simplex_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
        let p = SimplexPoint::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.weights(), &[0.25, 0.75]);
    }
}
