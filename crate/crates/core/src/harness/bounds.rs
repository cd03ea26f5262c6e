//! Closed-form regret bounds recomputed from a resolved configuration alone,
//! without touching learner code, so summaries can audit the CSV column.

use crate::error::Result;

use super::config::{ExperimentConfig, Problem};

/// The bound the learner of `config` must meet after `T` rounds.
pub fn closed_form_bound(config: &ExperimentConfig) -> Result<f64> {
    let t = config.rounds() as f64;
    let f = |k: &str| config.get::<f64>(k);
    Ok(match config.problem() {
        Problem::Matching => f("C")? * f("n")? * (2.0 * t).sqrt(),
        Problem::BMatching => f("C")? * f("B")? * f("n")? * (2.0 * t).sqrt(),
        Problem::Migration => f("window")? * f("n")? * (2.0 * t * f("K")?.ln()).sqrt(),
        Problem::Scheduling => {
            if config.raw("learner") == "ktoco" {
                let a = f("norm")?;
                a * (t * (1.0 + 24.0 * t * t * a * a).ln()).sqrt() + 1.0
            } else {
                f("B")? * (2.0 * f("m")? * f("f")? * t).sqrt()
            }
        }
        Problem::RoundRobin => 9.0 * f("B")? * (1.0 + (0.5 * t * t.max(1.0).ln()).sqrt()),
        Problem::SkiDiscrete => {
            let n = f("N")?;
            6.0 * n * (t * (f("B")? * n * t).max(1.0).ln()).sqrt()
        }
        Problem::SkiContinuous => {
            let (n, b) = (f("N")?, f("B")?);
            f("c1")? * (t * (n * t).max(1.0).ln()).sqrt() + f("c2")? * (n + b).powi(2) * t.powf(1.0 - f("beta")?)
        }
        Problem::Perm => {
            let n = f("n")?;
            f("W")? * f("P")? * n * (2.0 * n * t * n.ln()).sqrt()
        }
    })
}

/// Relative agreement used when auditing a recorded bound.
pub fn bounds_agree(recorded: f64, recomputed: f64) -> bool {
    (recorded - recomputed).abs() <= 1e-9 * recomputed.abs().max(1.0)
}
