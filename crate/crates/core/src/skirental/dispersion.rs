use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionReport {
    pub epsilon: f64,
    /// Largest number of points inside any closed interval `[x − ε, x + ε]`.
    pub max_ball_count: usize,
    pub threshold: f64,
    pub pass: bool,
}

/// Checks that no `ε`-ball with `ε = T^{−β}` holds more than `c·εT·ln T`
/// points. The supremum over centers is exact: a sliding window over the
/// sorted points.
pub fn dispersion_check(points: &[f64], beta: f64, constant: f64) -> Result<DispersionReport> {
    dispersion_check_radius(points, (points.len() as f64).powf(-beta), constant)
}

/// As [`dispersion_check`] with an explicit radius.
pub fn dispersion_check_radius(points: &[f64], epsilon: f64, constant: f64) -> Result<DispersionReport> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("dispersion points must be finite"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..sorted.len() {
        while sorted[hi] - sorted[lo] > 2.0 * epsilon {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    let t = points.len() as f64;
    let threshold = constant * epsilon * t * t.max(1.0).ln();
    Ok(DispersionReport {
        epsilon,
        max_ball_count: best,
        threshold,
        pass: best as f64 <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equally_spaced_points() {
        let (t, n) = (500, 20.0);
        let pts: Vec<f64> = (0..t).map(|i| i as f64 * n / (t - 1) as f64).collect();
        let r = dispersion_check_radius(&pts, n / (2.0 * t as f64), 4.0).unwrap();
        assert_eq!(r.max_ball_count, 1);
    }

    #[test]
    fn point_mass_fails() {
        let pts = vec![3.0; 1000];
        let r = dispersion_check(&pts, 0.5, 4.0).unwrap();
        assert_eq!(r.max_ball_count, 1000);
        assert!(!r.pass);
    }
}
