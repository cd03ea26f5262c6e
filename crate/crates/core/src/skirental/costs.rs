use std::f64::consts::E;
use std::path::Path;

use crate::error::{Error, Result};

/// One season: the number of skiing days and the purchase price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkiSeason {
    pub days: f64,
    pub buy: f64,
}

impl SkiSeason {
    pub fn new(days: f64, buy: f64) -> Result<Self> {
        if !(days > 1.0) || !days.is_finite() {
            return Err(Error::invalid(format!("season length {days} must exceed 1")));
        }
        if !(buy > 0.0) || !buy.is_finite() {
            return Err(Error::invalid(format!("buy price {buy} must be positive")));
        }
        Ok(SkiSeason { days, buy })
    }

    /// Offline optimum `min{b, n}`.
    pub fn optimum(&self) -> f64 {
        self.days.min(self.buy)
    }
}

/// Cost of trusting threshold `x`: buy at once if `x > b`, otherwise rent all
/// season.
pub fn discrete_cost(x: u32, season: &SkiSeason) -> Result<f64> {
    if x == 0 {
        return Err(Error::invalid("discrete thresholds start at 1"));
    }
    Ok(if f64::from(x) > season.buy { season.buy } else { season.days })
}

/// `(1 + 1/b)^{bλ}`.
fn growth(buy: f64, lambda: f64) -> f64 {
    (buy * lambda * (1.0 / buy).ln_1p()).exp()
}

/// `min{λ u(x), b, n} / (1 − (1 + 1/b)^{−bλ})`.
pub fn discrete_bound(x: u32, lambda: f64, season: &SkiSeason) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("trade-off parameter must lie in (0, 1]"));
    }
    let u = discrete_cost(x, season)?;
    Ok((lambda * u).min(season.optimum()) / (1.0 - 1.0 / growth(season.buy, lambda)))
}

/// Rent until day `x`, then buy: `n` if the season ends first, else `b + x`.
pub fn continuous_cost(x: f64, season: &SkiSeason) -> f64 {
    if season.days <= x {
        season.days
    } else {
        season.buy + x
    }
}

/// `min{u(x)/(1 − λ), e·min{n, b}/((e − 1)λ)}`; at `λ = 1` only the robust
/// term remains.
pub fn continuous_bound(x: f64, lambda: f64, season: &SkiSeason) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("trade-off parameter must lie in (0, 1]"));
    }
    let robust = E * season.optimum() / ((E - 1.0) * lambda);
    if lambda == 1.0 {
        return Ok(robust);
    }
    Ok((continuous_cost(x, season) / (1.0 - lambda)).min(robust))
}

/// Season stream file: `n b` per line.
pub fn read_seasons(path: &Path) -> Result<Vec<SkiSeason>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_seasons_text(&text, path)
}

/// [`read_seasons`] on text already in memory; `path` labels errors.
pub fn read_seasons_text(text: &str, path: &Path) -> Result<Vec<SkiSeason>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { path: path.to_path_buf(), line: i + 1, msg };
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(format!("expected a number, found {t:?}"))))
            .collect::<Result<_>>()?;
        let [days, buy] = vals[..] else {
            return Err(err("expected `n b`".into()));
        };
        out.push(SkiSeason::new(days, buy).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_examples() {
        let s = SkiSeason::new(10.0, 4.0).unwrap();
        assert_eq!(discrete_cost(5, &s).unwrap(), 4.0);
        assert_eq!(discrete_cost(3, &s).unwrap(), 10.0);
        assert!((discrete_bound(5, 1.0, &s).unwrap() - 4.0 / (1.0 - 1.25f64.powi(-4))).abs() < 1e-12);
        assert!((discrete_bound(5, 1.0, &s).unwrap() - 6.7751).abs() < 1e-4);
        let s = SkiSeason::new(5.0, 1.0).unwrap();
        assert!((discrete_bound(1, 1.0, &s).unwrap() - 2.0).abs() < 1e-12);
        assert!(discrete_bound(1, 0.0, &s).is_err());
    }

    #[test]
    fn continuous_examples() {
        let s = SkiSeason::new(3.0, 5.0).unwrap();
        assert_eq!(continuous_cost(2.0, &s), 7.0);
        assert_eq!(continuous_cost(4.0, &s), 3.0);
        assert_eq!(continuous_cost(0.0, &s), 5.0);
        let v = continuous_bound(2.0, 0.5, &s).unwrap();
        assert!((v - 6.0 * E / (E - 1.0)).abs() < 1e-12);
        assert!((continuous_bound(4.0, 1e-9, &s).unwrap() - 3.0).abs() < 1e-6);
        assert!((continuous_bound(4.0, 1.0, &s).unwrap() - 3.0 * E / (E - 1.0)).abs() < 1e-12);
    }
}
