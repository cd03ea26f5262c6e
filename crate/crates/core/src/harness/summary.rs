//! Reading experiment CSVs back into per-trial verdicts.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::learners::TOL;

use super::bounds::{bounds_agree, closed_form_bound};
use super::config::{ExperimentConfig, Problem};
use super::run::{sidecar_path, TrialSummary, CSV_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub trials: Vec<TrialSummary>,
    /// Whether the bound column was recomputed from a config sidecar.
    pub bound_audited: bool,
}

impl Summary {
    /// Fraction of trials within their bound; `None` without trials.
    pub fn pass_rate(&self) -> Option<f64> {
        (!self.trials.is_empty())
            .then(|| self.trials.iter().filter(|t| t.pass).count() as f64 / self.trials.len() as f64)
    }

    pub fn mean_regret(&self) -> Option<f64> {
        (!self.trials.is_empty()).then(|| self.trials.iter().map(|t| t.regret).sum::<f64>() / self.trials.len() as f64)
    }

    pub fn max_regret(&self) -> Option<f64> {
        self.trials.iter().map(|t| t.regret).reduce(f64::max)
    }

    pub fn all_pass(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6} {:>7} {:>14} {:>14}  verdict", "trial", "rounds", "regret", "bound")?;
        for t in &self.trials {
            let verdict = if t.pass { "pass" } else { "FAIL" };
            writeln!(f, "{:>6} {:>7} {:>14.6} {:>14.6}  {verdict}", t.trial, t.rounds, t.regret, t.bound)?;
        }
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6}"));
        writeln!(f, "mean regret {}  max regret {}", opt(self.mean_regret()), opt(self.max_regret()))?;
        write!(
            f,
            "pass rate {}  bound column {}",
            opt(self.pass_rate()),
            if self.bound_audited { "audited" } else { "not audited (no config sidecar)" }
        )
    }
}

/// Parses an experiment CSV. When `<path>.cfg` exists the bound column is
/// checked against the closed form recomputed from it.
pub fn summarize(path: &Path) -> Result<Summary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let expected = if side.exists() {
        let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let pairs = ExperimentConfig::parse_pairs(&text, &side)?;
        let problem: Problem = pairs
            .iter()
            .find(|(k, _)| k == "problem")
            .ok_or_else(|| Error::Config(format!("{}: missing problem", side.display())))?
            .1
            .parse()?;
        let config = ExperimentConfig::new(problem, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        Some(closed_form_bound(&config)?)
    } else {
        None
    };
    summarize_text(&text, path, expected)
}

pub fn summarize_text(text: &str, path: &Path, expected_bound: Option<f64>) -> Result<Summary> {
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((_, h)) => return Err(err(1, format!("unexpected header {h:?}"))),
        None => return Err(err(1, "missing header".into())),
    }
    let mut trials: Vec<TrialSummary> = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(err(n, format!("expected 8 fields, found {}", fields.len())));
        }
        let int = |k: usize, name: &str| fields[k].parse::<usize>().map_err(|_| err(n, format!("bad {name} {:?}", fields[k])));
        let real = |k: usize, name: &str| {
            fields[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(n, format!("bad {name} {:?}", fields[k])))
        };
        let (trial, t) = (int(0, "trial")?, int(1, "round")?);
        for (k, name) in [(2, "loss"), (3, "cum_loss"), (4, "comparator_loss")] {
            real(k, name)?;
        }
        let regret = real(5, "regret")?;
        let bound = real(6, "bound")?;
        if fields[7].len() != 16 || !fields[7].bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(err(n, format!("bad action digest {:?}", fields[7])));
        }
        if let Some(e) = expected_bound {
            if !bounds_agree(bound, e) {
                return Err(err(n, format!("bound {bound} disagrees with the closed form {e}")));
            }
        }
        match trials.last_mut() {
            Some(last) if last.trial == trial => {
                if t != last.rounds + 1 {
                    return Err(err(n, format!("round {t} follows round {}", last.rounds)));
                }
                last.rounds = t;
                last.regret = regret;
                last.bound = bound;
            }
            _ => {
                if trials.iter().any(|s| s.trial == trial) {
                    return Err(err(n, format!("trial {trial} appears in two separate blocks")));
                }
                if t != 1 {
                    return Err(err(n, format!("trial {trial} starts at round {t}")));
                }
                trials.push(TrialSummary { trial, rounds: 1, regret, bound, pass: false });
            }
        }
    }
    for t in &mut trials {
        t.pass = t.regret <= t.bound + TOL;
    }
    Ok(Summary { trials, bound_audited: expected_bound.is_some() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW_OK: &str = "0,1,1,1,0,1,5,00112233aabbccdd";

    #[test]
    fn pass_and_fail() {
        let text = format!("{CSV_HEADER}\n{ROW_OK}\n0,2,1,2,0,2,5,00112233aabbccdd\n1,1,9,9,0,9,5,00112233aabbccdd\n");
        let s = summarize_text(&text, Path::new("x.csv"), Some(5.0)).unwrap();
        assert_eq!(s.trials.len(), 2);
        assert!(s.trials[0].pass);
        assert!(!s.trials[1].pass);
        assert_eq!(s.pass_rate(), Some(0.5));
        assert_eq!(s.max_regret(), Some(9.0));
    }

    #[test]
    fn empty_body() {
        let s = summarize_text(&format!("{CSV_HEADER}\n"), Path::new("x.csv"), None).unwrap();
        assert!(s.trials.is_empty());
        assert_eq!(s.pass_rate(), None);
        assert!(s.all_pass());
    }

    #[test]
    fn malformed_rows_name_their_line() {
        for bad in ["0,1,1,1,0,1,5", "0,1,x,1,0,1,5,00112233aabbccdd", "0,2,1,1,0,1,5,00112233aabbccdd", "0,1,1,1,0,1,5,zz"] {
            let text = format!("{CSV_HEADER}\n{bad}\n");
            let e = summarize_text(&text, Path::new("x.csv"), None).unwrap_err();
            assert!(e.to_string().starts_with("x.csv:2:"), "{e}");
        }
        let e = summarize_text(&format!("{CSV_HEADER}\n{ROW_OK}\n"), Path::new("x.csv"), Some(4.0)).unwrap_err();
        assert!(e.to_string().contains("closed form"));
    }
}
