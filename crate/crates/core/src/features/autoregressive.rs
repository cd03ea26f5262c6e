use std::path::Path;

use crate::error::{Error, Result};
use crate::learners::SimplexPoint;

/// Concatenated one-hot encodings of the last `order` requests, oldest block
/// first, each block scaled by `1/order` so the result is a distribution over
/// `order · points` coordinates.
///
/// Positions before the start of the history use a start symbol: a uniform
/// block (every entry `1/(order · points)`). `history` may be longer than
/// `order`; only its tail is used.
pub fn autoregressive_features(history: &[usize], order: usize, points: usize) -> Result<SimplexPoint> {
    if order == 0 || points == 0 {
        return Err(Error::invalid("order and point count must be positive"));
    }
    if let Some(&bad) = history.iter().find(|&&s| s >= points) {
        return Err(Error::invalid(format!("request {bad} outside {points} points")));
    }
    let scale = 1.0 / order as f64;
    let tail = &history[history.len().saturating_sub(order)..];
    let pad = order - tail.len();
    let mut out = vec![0.0; order * points];
    for block in 0..pad {
        out[block * points..(block + 1) * points].fill(scale / points as f64);
    }
    for (i, &s) in tail.iter().enumerate() {
        out[(pad + i) * points + s] = scale;
    }
    SimplexPoint::new(out)
}

/// Feature file: one simplex vector per non-blank line.
pub fn read_features(path: &Path) -> Result<Vec<SimplexPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { path: path.to_path_buf(), line: i + 1, msg };
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("expected a number, found {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(prev) = out.first().map(SimplexPoint::dim) {
            if prev != vals.len() {
                return Err(err(format!("expected {prev} entries, found {}", vals.len())));
            }
        }
        out.push(SimplexPoint::new(vals).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn single_request() {
        let f = autoregressive_features(&[1], 1, 3).unwrap();
        assert_eq!(f.weights(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn repeated_requests_align() {
        let f = autoregressive_features(&[2, 0, 0], 2, 3).unwrap();
        assert_eq!(f.weights(), &[0.5, 0.0, 0.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn short_history_is_padded() {
        let f = autoregressive_features(&[1], 3, 2).unwrap();
        assert_eq!(f.weights(), &[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.0, 1.0 / 3.0]);
        let empty = autoregressive_features(&[], 2, 2).unwrap();
        assert!(empty.weights().iter().all(|v| *v == 0.25));
        assert!(autoregressive_features(&[5], 1, 2).is_err());
    }

    #[test]
    fn feature_file_validation() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "0.5 0.5\n\n1 0").unwrap();
        assert_eq!(read_features(file.path()).unwrap().len(), 2);
        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "0.5 0.5\n0.7 0.7").unwrap();
        let e = read_features(bad.path()).unwrap_err().to_string();
        assert!(e.contains(":2:"), "{e}");
    }
}
