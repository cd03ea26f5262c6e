use crate::error::{check_dim, Error, Result};

/// Coordinatewise nearest integer, halves rounded away from zero.
pub fn round_to_integer(y: &[f64]) -> Result<Vec<i64>> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cannot round a non-finite dual"));
    }
    Ok(y.iter().map(|v| v.round() as i64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualNorm {
    L1,
    /// ℓ1 weighted by the node demands.
    WeightedL1,
    Linf,
}

/// Norm of `x − target` used as the prediction-quality measure.
pub fn dual_error(x: &[f64], target: &[f64], demand: Option<&[u32]>, norm: DualNorm) -> Result<f64> {
    check_dim(x.len(), target.len())?;
    let diffs = x.iter().zip(target).map(|(a, b)| (a - b).abs());
    Ok(match norm {
        DualNorm::L1 => diffs.sum(),
        DualNorm::Linf => diffs.fold(0.0, f64::max),
        DualNorm::WeightedL1 => {
            let b = demand.ok_or_else(|| Error::invalid("weighted ℓ1 error needs a demand vector"))?;
            check_dim(x.len(), b.len())?;
            diffs.zip(b).map(|(d, w)| d * f64::from(*w)).sum()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_integer() {
        assert_eq!(round_to_integer(&[0.4, -1.6]).unwrap(), vec![0, -2]);
        assert_eq!(round_to_integer(&[2.5, -2.5, 3.0]).unwrap(), vec![3, -3, 3]);
        assert!(round_to_integer(&[f64::NAN]).is_err());
    }

    #[test]
    fn rounding_example() {
        let rounded = round_to_integer(&[0.6]).unwrap()[0] as f64;
        assert_eq!(dual_error(&[1.0], &[rounded], None, DualNorm::L1).unwrap(), 0.0);
    }

    #[test]
    fn norms() {
        let zero = [0.0, 0.0];
        assert_eq!(dual_error(&[1.0, -1.0], &zero, Some(&[2, 3]), DualNorm::WeightedL1).unwrap(), 5.0);
        assert_eq!(dual_error(&[1.0, -3.0], &zero, None, DualNorm::Linf).unwrap(), 3.0);
        assert_eq!(dual_error(&zero, &zero, None, DualNorm::L1).unwrap(), 0.0);
        assert!(dual_error(&zero, &zero, None, DualNorm::WeightedL1).is_err());
    }
}
