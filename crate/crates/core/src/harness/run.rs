//! Experiment loop: one learner run per trial, rows in trial order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::learners::{RegretLedger, TOL};
use crate::matching::ogd_dual_learner;
use crate::migration::eg_sequence_learner;
use crate::permutations::perm_eg_learner;
use crate::scheduling::{ktoco_logit_learner, lambda_forecaster, ogd_bounded_matrix_learner};
use crate::skirental::{continuous_forecaster, discrete_grid_learner, ContinuousConfig, DiscreteConfig};

use super::bounds::{bounds_agree, closed_form_bound};
use super::config::{ExperimentConfig, StreamKind};
use super::stream::{bmatching_targets, generate, matching_targets, trial_rng, Instances};

pub const CSV_HEADER: &str = "trial,t,loss,cum_loss,comparator_loss,regret,bound,action_digest";

/// First 16 hex digits of the SHA-256 of the action's little-endian bytes.
pub fn action_digest(action: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in action {
        h.update(v.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: usize,
    pub rounds: usize,
    pub regret: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    /// The configuration with stream-derived values filled in.
    pub resolved: ExperimentConfig,
    pub trials: Vec<TrialSummary>,
    pub csv: String,
}

impl ExperimentRun {
    pub fn all_pass(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }

    /// Writes the CSV to `out` and the resolved config next to it.
    pub fn write(&self, out: &Path) -> Result<()> {
        std::fs::write(out, &self.csv).map_err(|e| Error::io(out, e))?;
        let side = sidecar_path(out);
        std::fs::write(&side, self.resolved.to_text()).map_err(|e| Error::io(&side, e))
    }
}

/// `<out>.cfg`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".cfg");
    PathBuf::from(s)
}

/// Runs every trial of `config`, in parallel when `threads ≠ 1`. Output does
/// not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    let trials: Vec<usize> = (0..config.trials()).collect();
    let work = || trials.par_iter().map(|&t| run_trial(config, t)).collect::<Result<Vec<_>>>();
    let results = match config.threads() {
        0 => work()?,
        k => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {k} worker threads: {e}")))?
            .install(work)?,
    };
    let mut csv = format!("{CSV_HEADER}\n");
    let mut summaries = Vec::with_capacity(results.len());
    let mut resolved = None;
    for (rows, summary, cfg) in results {
        csv.push_str(&rows);
        summaries.push(summary);
        resolved.get_or_insert(cfg);
    }
    Ok(ExperimentRun {
        resolved: resolved.unwrap_or_else(|| config.clone()),
        trials: summaries,
        csv,
    })
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<(String, TrialSummary, ExperimentConfig)> {
    let mut rng = trial_rng(config.seed(), trial as u64);
    let stream = generate(config, &mut rng)?;
    let resolved = resolve(config, &stream.instances, stream.kind)?;
    let ledger = learn(&resolved, &stream.instances, &mut rng)?;
    let expected = closed_form_bound(&resolved)?;
    if !bounds_agree(ledger.bound_value, expected) {
        return Err(Error::Config(format!(
            "learner bound {} disagrees with the closed form {expected}",
            ledger.bound_value
        )));
    }
    let mut rows = String::new();
    let (mut cum, mut cum_cmp) = (0.0, 0.0);
    for r in &ledger.rounds {
        cum += r.loss;
        cum_cmp += r.comparator_loss;
        let _ = writeln!(
            rows,
            "{trial},{},{},{cum},{},{},{},{}",
            r.round,
            r.loss,
            r.comparator_loss,
            cum - cum_cmp,
            ledger.bound_value,
            action_digest(&r.action)
        );
    }
    let regret = ledger.regret();
    let summary = TrialSummary {
        trial,
        rounds: ledger.len(),
        regret,
        bound: ledger.bound_value,
        pass: regret <= ledger.bound_value + TOL,
    };
    Ok((rows, summary, resolved))
}

/// Fills in values a file stream determines (round count, sizes, caps).
fn resolve(config: &ExperimentConfig, instances: &Instances, kind: StreamKind) -> Result<ExperimentConfig> {
    let mut c = config.clone();
    if kind != StreamKind::File {
        return Ok(c);
    }
    c.set("T", instances.len())?;
    let bad = |msg: String| Err(Error::Config(msg));
    match instances {
        Instances::Matching(v) => {
            if let Some(first) = v.first() {
                c.set("n", first.n())?;
            }
        }
        Instances::BMatching(v) => {
            if let Some((first, _)) = v.first() {
                c.set("n", first.n())?;
            }
            let top = v.iter().flat_map(|(_, d)| d.iter().copied()).max().unwrap_or(1).max(1);
            c.set("B", top)?;
        }
        Instances::Migration(v) => {
            if let Some(first) = v.first() {
                c.set("n", first.len())?;
            }
            let k: usize = c.get("K")?;
            if v.iter().flatten().any(|&s| s >= k) {
                return bad(format!("stream requests exceed K = {k}"));
            }
        }
        Instances::Scheduling { reference, .. } => {
            c.set("m", reference.rows())?;
            c.set("f", reference.cols())?;
            if c.raw("learner") == "ktoco" {
                c.set("norm", reference.frobenius_norm())?;
            }
        }
        Instances::Perm(v) => {
            if let Some(first) = v.first() {
                c.set("n", first.len())?;
            }
        }
        Instances::RoundRobin(_) | Instances::SkiDiscrete(_) | Instances::SkiContinuous(_) => {}
    }
    Ok(c)
}

fn learn<R: rand::Rng + ?Sized>(c: &ExperimentConfig, instances: &Instances, rng: &mut R) -> Result<RegretLedger> {
    let step = c.step();
    match instances {
        Instances::Matching(v) => ogd_dual_learner(&matching_targets(v)?, None, c.get("C")?, step),
        Instances::BMatching(v) => {
            let (targets, weights) = bmatching_targets(v)?;
            ogd_dual_learner(&targets, Some(&weights), c.get("C")?, step)
        }
        Instances::Migration(v) => eg_sequence_learner(v, c.get("K")?, c.get("window")?, step),
        Instances::Scheduling { rounds, reference } => {
            if c.raw("learner") == "ktoco" {
                ktoco_logit_learner(rounds, reference)
            } else {
                ogd_bounded_matrix_learner(rounds, c.get("m")?, c.get("f")?, c.get("B")?, step)
            }
        }
        Instances::RoundRobin(v) => {
            let errors: Vec<f64> = v.iter().map(|i| i.eta() / i.len() as f64).collect();
            lambda_forecaster(&errors, c.get("B")?, c.get("grid")?, step, rng)
        }
        Instances::SkiDiscrete(v) => {
            let config = DiscreteConfig { delta: c.get_auto("delta")?, step };
            discrete_grid_learner(v, c.get("N")?, c.get("B")?, config, rng)
        }
        Instances::SkiContinuous(v) => {
            let config = ContinuousConfig {
                x_points: c.get("x_points")?,
                lambda_points: c.get("lambda_points")?,
                step,
                c1: c.get("c1")?,
                c2: c.get("c2")?,
                beta: c.get("beta")?,
                dispersion_constant: c.get("dispersion_c")?,
            };
            Ok(continuous_forecaster(v, c.get("N")?, c.get("B")?, config, rng)?.ledger)
        }
        Instances::Perm(v) => perm_eg_learner(v, c.get("W")?, c.get("P")?, step, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Problem;
    use crate::learners::best_in_hindsight_l1;
    use crate::learners::subgradient::l1_distance;
    use crate::learners::BoxDomain;

    fn small(problem: Problem, extra: &[(&str, &str)]) -> ExperimentConfig {
        let mut pairs = vec![("T", "30"), ("trials", "3")];
        pairs.extend_from_slice(extra);
        match problem {
            Problem::SkiContinuous => pairs.extend([("x_points", "41"), ("lambda_points", "10")]),
            Problem::SkiDiscrete => pairs.push(("delta", "0.05")),
            Problem::Migration => pairs.extend([("n", "8"), ("K", "3"), ("window", "2")]),
            _ => {}
        }
        ExperimentConfig::new(problem, pairs).unwrap()
    }

    #[test]
    fn zero_rounds_give_header_only() {
        let run = run_experiment(&small(Problem::Matching, &[("T", "0")])).unwrap();
        assert_eq!(run.csv, format!("{CSV_HEADER}\n"));
        assert!(run.all_pass());
    }

    #[test]
    fn every_problem_runs_within_bound() {
        for p in Problem::ALL {
            for stream in ["iid", "drifting", "adversarial"] {
                let run = run_experiment(&small(p, &[("stream", stream)])).unwrap();
                assert_eq!(run.csv.lines().count(), 1 + 90, "{p} {stream}");
                assert!(run.all_pass(), "{p} {stream}: {:?}", run.trials);
            }
        }
        let run = run_experiment(&small(Problem::Scheduling, &[("learner", "ktoco")])).unwrap();
        assert!(run.all_pass());
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let one = run_experiment(&small(Problem::Perm, &[("threads", "1"), ("trials", "4")])).unwrap();
        let many = run_experiment(&small(Problem::Perm, &[("threads", "3"), ("trials", "4")])).unwrap();
        assert_eq!(one.csv, many.csv);
        assert_eq!(one, run_experiment(&small(Problem::Perm, &[("threads", "1"), ("trials", "4")])).unwrap());
    }

    #[test]
    fn noiseless_matching_rows_stay_within_bound() {
        let run = run_experiment(&small(Problem::Matching, &[("noise", "0"), ("T", "200")])).unwrap();
        for line in run.csv.lines().skip(1) {
            let f: Vec<f64> = line.split(',').take(7).map(|x| x.parse().unwrap()).collect();
            assert!(f[5] <= f[6] + TOL, "{line}");
        }
    }

    #[test]
    fn drift_costs_more_than_segment_optima() {
        let c = small(Problem::Matching, &[("stream", "drifting"), ("T", "60"), ("noise", "0")]);
        let mut rng = trial_rng(c.seed(), 0);
        let Instances::Matching(v) = generate(&c, &mut rng).unwrap().instances else { unreachable!() };
        let targets = matching_targets(&v).unwrap();
        let domain = BoxDomain::symmetric(10, 5.0).unwrap();
        let whole = best_in_hindsight_l1(&targets, None, &domain).unwrap().1;
        let split: f64 = [&targets[..30], &targets[30..]]
            .iter()
            .map(|seg| {
                let (best, _) = best_in_hindsight_l1(seg, None, &domain).unwrap();
                seg.iter().map(|t| l1_distance(&best, t, None)).sum::<f64>()
            })
            .sum();
        assert!(whole > split + 1e-9, "{whole} vs {split}");
    }

    #[test]
    fn file_stream_matches_generated_run() {
        let dir = tempfile::tempdir().unwrap();
        let c = small(Problem::BMatching, &[("trials", "1")]);
        let stream = generate(&c, &mut trial_rng(c.seed(), 0)).unwrap();
        let path = dir.path().join("s.txt");
        super::super::stream::write_stream(&stream.instances, &path).unwrap();
        let from_file = small(Problem::BMatching, &[("trials", "1"), ("stream", "file"), ("input", path.to_str().unwrap()), ("T", "1000")]);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&from_file).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(b.resolved.rounds(), 30);
    }

    #[test]
    fn written_runs_summarize() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let run = run_experiment(&small(Problem::RoundRobin, &[])).unwrap();
        run.write(&out).unwrap();
        let s = crate::harness::summarize(&out).unwrap();
        assert!(s.bound_audited);
        assert_eq!(s.trials, run.trials);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(action_digest(&[]), "e3b0c44298fc1c14");
        assert_eq!(action_digest(&[1.0]).len(), 16);
    }
}
