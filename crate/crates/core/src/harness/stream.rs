//! Seeded instance generators and the stream file format.
//!
//! Every trial owns a ChaCha20 generator seeded from the experiment seed with
//! the trial index as its stream id, so trials are reproducible in isolation
//! and independent of scheduling order.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::matching::io::{format_instance, parse_instance};
use crate::matching::{b_matching_solve, hungarian_solve, BipartiteInstance};
use crate::matrix::Matrix;
use crate::permutations::JobBatch;
use crate::scheduling::{planted_logit_map, LogitRound, RoundRobinInstance};
use crate::skirental::SkiSeason;

use super::config::{ExperimentConfig, Problem, StreamKind};

/// The generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instances {
    Matching(Vec<BipartiteInstance>),
    BMatching(Vec<(BipartiteInstance, Vec<u32>)>),
    Migration(Vec<Vec<usize>>),
    /// Rounds plus the fixed map the parameter-free learner is compared to.
    Scheduling { rounds: Vec<LogitRound>, reference: Matrix },
    RoundRobin(Vec<RoundRobinInstance>),
    SkiDiscrete(Vec<SkiSeason>),
    SkiContinuous(Vec<SkiSeason>),
    Perm(Vec<JobBatch>),
}

impl Instances {
    pub fn len(&self) -> usize {
        match self {
            Instances::Matching(v) => v.len(),
            Instances::BMatching(v) => v.len(),
            Instances::Migration(v) => v.len(),
            Instances::Scheduling { rounds, .. } => rounds.len(),
            Instances::RoundRobin(v) => v.len(),
            Instances::SkiDiscrete(v) | Instances::SkiContinuous(v) => v.len(),
            Instances::Perm(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceStream {
    pub kind: StreamKind,
    pub instances: Instances,
}

/// Builds the stream of one trial. File streams are read from the configured
/// input and truncated to `T` rounds.
pub fn generate<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<InstanceStream> {
    let kind = config.stream();
    let instances = if kind == StreamKind::File {
        let path = config.input().expect("validated");
        let mut all = read_stream(config.problem(), &path)?;
        truncate(&mut all, config.rounds());
        all
    } else {
        synthesize(config, kind, rng)?
    };
    Ok(InstanceStream { kind, instances })
}

fn truncate(instances: &mut Instances, t: usize) {
    match instances {
        Instances::Matching(v) => v.truncate(t),
        Instances::BMatching(v) => v.truncate(t),
        Instances::Migration(v) => v.truncate(t),
        Instances::Scheduling { rounds, .. } => rounds.truncate(t),
        Instances::RoundRobin(v) => v.truncate(t),
        Instances::SkiDiscrete(v) | Instances::SkiContinuous(v) => v.truncate(t),
        Instances::Perm(v) => v.truncate(t),
    }
}

/// Which of two ground truths round `t` uses.
fn regime(kind: StreamKind, t: usize, breakpoint: usize) -> usize {
    match kind {
        StreamKind::Drifting if t >= breakpoint => 1,
        StreamKind::Adversarial => t % 2,
        _ => 0,
    }
}

fn synthesize<R: Rng + ?Sized>(config: &ExperimentConfig, kind: StreamKind, rng: &mut R) -> Result<Instances> {
    let t = config.rounds();
    let bp = config.breakpoint();
    Ok(match config.problem() {
        Problem::Matching | Problem::BMatching => {
            let side = config.get::<usize>("n")? / 2;
            let max_cost: i64 = config.get("max_cost")?;
            let noise: i64 = config.get("noise")?;
            let first: Vec<i64> = (0..side * side).map(|_| rng.random_range(0..=max_cost)).collect();
            let second: Vec<i64> = match kind {
                // the mirror image moves every dual as far as possible
                StreamKind::Adversarial => first.iter().map(|c| max_cost - c).collect(),
                _ => (0..side * side).map(|_| rng.random_range(0..=max_cost)).collect(),
            };
            let mut instances = Vec::with_capacity(t);
            for round in 0..t {
                let base = if regime(kind, round, bp) == 0 { &first } else { &second };
                let costs: Vec<i64> = base
                    .iter()
                    .map(|&c| (c + rng.random_range(-noise..=noise)).clamp(0, max_cost))
                    .collect();
                instances.push(BipartiteInstance::complete(side, &costs)?);
            }
            if config.problem() == Problem::Matching {
                Instances::Matching(instances)
            } else {
                let cap: u32 = config.get("B")?;
                let with_demand = instances
                    .into_iter()
                    .map(|inst| {
                        let d = balanced_demand(side, cap, rng);
                        (inst, d)
                    })
                    .collect();
                Instances::BMatching(with_demand)
            }
        }
        Problem::Migration => {
            let n: usize = config.get("n")?;
            let k: usize = config.get("K")?;
            let noise: f64 = config.get("noise")?;
            let patterns: [Vec<usize>; 2] = [
                (0..n).map(|_| rng.random_range(0..k)).collect(),
                (0..n).map(|_| rng.random_range(0..k)).collect(),
            ];
            let seqs = (0..t)
                .map(|round| {
                    if kind == StreamKind::Adversarial {
                        return (0..n).map(|_| rng.random_range(0..k)).collect();
                    }
                    let p = &patterns[regime(kind, round, bp)];
                    p.iter()
                        .map(|&s| if rng.random_bool(noise) { rng.random_range(0..k) } else { s })
                        .collect()
                })
                .collect();
            Instances::Migration(seqs)
        }
        Problem::Scheduling => {
            let m: usize = config.get("m")?;
            let f: usize = config.get("f")?;
            let cap: f64 = config.get("B")?;
            let norm: f64 = config.get("norm")?;
            let noise: f64 = config.get("noise")?;
            let reference = planted_logit_map(m, f, norm, cap, rng)?;
            let second = planted_logit_map(m, f, norm, cap, rng)?;
            let mut rounds = Vec::with_capacity(t);
            for round in 0..t {
                let fresh;
                let map = match kind {
                    StreamKind::Adversarial => {
                        fresh = planted_logit_map(m, f, norm, cap, rng)?;
                        &fresh
                    }
                    _ if regime(kind, round, bp) == 1 => &second,
                    _ => &reference,
                };
                let raw: Vec<f64> = (0..f).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = raw.iter().sum();
                let features: Vec<f64> = raw.iter().map(|v| v / total).collect();
                let logits = map.mul_vec(&features)?;
                let weights = logits
                    .iter()
                    .map(|l| {
                        let z: f64 = StandardNormal.sample(rng);
                        (l + noise * z).exp()
                    })
                    .collect();
                rounds.push(LogitRound { weights, features });
            }
            Instances::Scheduling { rounds, reference }
        }
        Problem::RoundRobin => {
            let cap: f64 = config.get("B")?;
            let jobs: usize = config.get("jobs")?;
            let levels = [rng.random_range(0.0..0.3), rng.random_range(0.7..1.0)];
            let instances = (0..t)
                .map(|round| {
                    rr_instance(jobs, cap * levels[regime(kind, round, bp)], rng)
                })
                .collect::<Result<Vec<_>>>()?;
            Instances::RoundRobin(instances)
        }
        Problem::SkiDiscrete => {
            let n_max: u32 = config.get("N")?;
            let b_max: f64 = config.get("B")?;
            let buy_max = b_max.floor() as u32;
            let split = (n_max / 2).max(2);
            let ranges = [(2, split), (split.min(n_max), n_max)];
            let seasons = (0..t)
                .map(|round| {
                    let (days, buy) = if kind == StreamKind::Adversarial {
                        if round % 2 == 0 { (2, buy_max) } else { (n_max, 1) }
                    } else {
                        let (lo, hi) = ranges[regime(kind, round, bp)];
                        (rng.random_range(lo..=hi), rng.random_range(1..=buy_max))
                    };
                    SkiSeason::new(f64::from(days), f64::from(buy))
                })
                .collect::<Result<Vec<_>>>()?;
            Instances::SkiDiscrete(seasons)
        }
        Problem::SkiContinuous => {
            let n_max: f64 = config.get("N")?;
            let b_max: f64 = config.get("B")?;
            let seasons = (0..t)
                .map(|round| {
                    // 1 − u lies in (0, 1], keeping days strictly above 1
                    let u = 1.0 - rng.random::<f64>();
                    let days = match kind {
                        StreamKind::Iid | StreamKind::File => 1.0 + (n_max - 1.0) * u,
                        StreamKind::Drifting => {
                            let half = 1.0 + (n_max - 1.0) / 2.0;
                            if round < bp { 1.0 + (half - 1.0) * u } else { half + (n_max - half) * u }
                        }
                        StreamKind::Adversarial => {
                            let centre = if round % 2 == 0 { 0.25 } else { 0.75 };
                            1.0 + (n_max - 1.0) * (centre + 1e-3 * (u - 0.5))
                        }
                    };
                    let buy = 1.0 + (b_max - 1.0).max(0.0) * rng.random::<f64>();
                    SkiSeason::new(days, buy.min(b_max))
                })
                .collect::<Result<Vec<_>>>()?;
            Instances::SkiContinuous(seasons)
        }
        Problem::Perm => {
            let n: usize = config.get("n")?;
            let w_max: f64 = config.get("W")?;
            let p_max: f64 = config.get("P")?;
            let bases: [(Vec<f64>, Vec<f64>); 2] = std::array::from_fn(|_| {
                (
                    (0..n).map(|_| rng.random_range(0.0..=w_max)).collect(),
                    (0..n).map(|_| rng.random_range(0.0..=p_max)).collect(),
                )
            });
            let batches = (0..t)
                .map(|round| {
                    if kind == StreamKind::Adversarial {
                        return JobBatch::new(
                            (0..n).map(|_| rng.random_range(0.0..=w_max)).collect(),
                            (0..n).map(|_| rng.random_range(0.0..=p_max)).collect(),
                        );
                    }
                    let (w, p) = &bases[regime(kind, round, bp)];
                    let jitter = |v: f64, cap: f64, rng: &mut R| (v + 0.1 * cap * rng.random_range(-1.0..=1.0)).clamp(0.0, cap);
                    let w = w.iter().map(|&v| jitter(v, w_max, rng)).collect();
                    let p = p.iter().map(|&v| jitter(v, p_max, rng)).collect();
                    JobBatch::new(w, p)
                })
                .collect::<Result<Vec<_>>>()?;
            Instances::Perm(batches)
        }
    })
}

/// Left node 0 demands `cap`; the rest are uniform in `1..=cap`, and the
/// right side is adjusted to the same total.
fn balanced_demand<R: Rng + ?Sized>(side: usize, cap: u32, rng: &mut R) -> Vec<u32> {
    let mut left: Vec<u32> = (0..side).map(|_| rng.random_range(1..=cap)).collect();
    left[0] = cap;
    let mut right: Vec<u32> = (0..side).map(|_| rng.random_range(1..=cap)).collect();
    let target: u32 = left.iter().sum();
    let mut order: Vec<usize> = (0..side).collect();
    order.shuffle(rng);
    let mut total: u32 = right.iter().sum();
    while total != target {
        for &v in &order {
            if total < target && right[v] < cap {
                right[v] += 1;
                total += 1;
            } else if total > target && right[v] > 1 {
                right[v] -= 1;
                total -= 1;
            }
        }
    }
    left.extend(right);
    left
}

/// True sizes in `[1, 10]`, each prediction off by at most `spread`.
fn rr_instance<R: Rng + ?Sized>(jobs: usize, spread: f64, rng: &mut R) -> Result<RoundRobinInstance> {
    let truth: Vec<f64> = (0..jobs).map(|_| rng.random_range(1.0..=10.0)).collect();
    let predicted = truth
        .iter()
        .map(|&s| {
            let e = if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 };
            // keep predictions positive; clamping only shrinks the error
            (s + e).max(1e-3)
        })
        .collect();
    RoundRobinInstance::new(truth, predicted)
}

/// Optimal duals of every matching instance, as the learner's targets.
pub fn matching_targets(instances: &[BipartiteInstance]) -> Result<Vec<Vec<f64>>> {
    instances
        .iter()
        .map(|inst| Ok(hungarian_solve(inst)?.optimal_duals.iter().map(|&d| d as f64).collect()))
        .collect()
}

/// Optimal duals and demand weights of every b-matching instance.
pub fn bmatching_targets(instances: &[(BipartiteInstance, Vec<u32>)]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut targets = Vec::with_capacity(instances.len());
    let mut weights = Vec::with_capacity(instances.len());
    for (inst, demand) in instances {
        let report = b_matching_solve(inst, demand, &vec![0.0; inst.n()])?;
        targets.push(report.optimal_duals.iter().map(|&d| d as f64).collect());
        weights.push(demand.iter().map(|&b| f64::from(b)).collect());
    }
    Ok((targets, weights))
}

fn join(v: impl IntoIterator<Item = impl ToString>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serializes instances in the stream file format read by [`read_stream`].
///
/// - matching: instance blocks separated by `---` lines; b-matching blocks end
///   with a `demand …` line;
/// - migration: one request sequence per line;
/// - scheduling: `m f`, the `m` rows of the reference map, then
///   `weights… | features…` per round;
/// - rr: `true sizes… | predicted sizes…` per instance;
/// - ski: `n b` per season;
/// - perm: `n`, weights line, processing line per batch.
pub fn format_stream(instances: &Instances) -> String {
    let mut out = String::new();
    match instances {
        Instances::Matching(v) => {
            for inst in v {
                out.push_str(&format_instance(inst));
                out.push_str("---\n");
            }
        }
        Instances::BMatching(v) => {
            for (inst, d) in v {
                out.push_str(&format_instance(inst));
                let _ = writeln!(out, "demand {}\n---", join(d));
            }
        }
        Instances::Migration(v) => {
            for s in v {
                let _ = writeln!(out, "{}", join(s));
            }
        }
        Instances::Scheduling { rounds, reference } => {
            let _ = writeln!(out, "{} {}", reference.rows(), reference.cols());
            for r in 0..reference.rows() {
                let _ = writeln!(out, "{}", join(reference.row(r)));
            }
            for r in rounds {
                let _ = writeln!(out, "{} | {}", join(&r.weights), join(&r.features));
            }
        }
        Instances::RoundRobin(v) => {
            for inst in v {
                let _ = writeln!(out, "{} | {}", join(inst.true_sizes()), join(inst.predicted_sizes()));
            }
        }
        Instances::SkiDiscrete(v) | Instances::SkiContinuous(v) => {
            for s in v {
                let _ = writeln!(out, "{} {}", s.days, s.buy);
            }
        }
        Instances::Perm(v) => {
            for b in v {
                let _ = writeln!(out, "{}\n{}\n{}", b.len(), join(b.weights()), join(b.processing()));
            }
        }
    }
    out
}

pub fn write_stream(instances: &Instances, path: &Path) -> Result<()> {
    std::fs::write(path, format_stream(instances)).map_err(|e| Error::io(path, e))
}

pub fn read_stream(problem: Problem, path: &Path) -> Result<Instances> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stream(problem, &text, path)
}

fn numbers<T: std::str::FromStr>(text: &str, path: &Path, line: usize) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("expected a number, found {t:?}"),
            })
        })
        .collect()
}

fn split_bar<'a>(text: &'a str, path: &Path, line: usize) -> Result<(&'a str, &'a str)> {
    text.split_once('|').ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: "expected `… | …`".into(),
    })
}

pub fn parse_stream(problem: Problem, text: &str, path: &Path) -> Result<Instances> {
    let at = |line: usize, e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::Parse { path: path.to_path_buf(), line, msg: other.to_string() },
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    Ok(match problem {
        Problem::Matching | Problem::BMatching => {
            let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
            for &(n, l) in &lines {
                if l == "---" {
                    blocks.push(Vec::new());
                } else {
                    blocks.last_mut().expect("nonempty").push((n, l));
                }
            }
            let mut plain = Vec::new();
            let mut with_demand = Vec::new();
            for block in blocks.into_iter().filter(|b| !b.is_empty()) {
                let (demand, body): (Vec<_>, Vec<_>) = block.into_iter().partition(|(_, l)| l.starts_with("demand"));
                // pad with blank lines so parse errors keep file line numbers
                let mut padded = String::new();
                let mut cur = 1;
                for (n, l) in &body {
                    while cur < *n {
                        padded.push('\n');
                        cur += 1;
                    }
                    padded.push_str(l);
                }
                let inst = parse_instance(&padded, path)?;
                if problem == Problem::Matching {
                    plain.push(inst);
                } else {
                    let &[(n, l)] = demand.as_slice() else {
                        let line = body.first().map_or(0, |b| b.0);
                        return Err(Error::Parse { path: path.to_path_buf(), line, msg: "b-matching block needs one `demand` line".into() });
                    };
                    let d: Vec<u32> = numbers(&l["demand".len()..], path, n)?;
                    crate::matching::validate_demand(&inst, &d).map_err(|e| at(n, e))?;
                    with_demand.push((inst, d));
                }
            }
            if problem == Problem::Matching {
                Instances::Matching(plain)
            } else {
                Instances::BMatching(with_demand)
            }
        }
        Problem::Migration => Instances::Migration(
            lines.iter().map(|&(n, l)| numbers(l, path, n)).collect::<Result<Vec<_>>>()?,
        ),
        Problem::Scheduling => {
            let Some(&(hn, head)) = lines.first() else {
                return Err(Error::Parse { path: path.to_path_buf(), line: 0, msg: "empty scheduling stream".into() });
            };
            let dims: Vec<usize> = numbers(head, path, hn)?;
            let &[m, f] = dims.as_slice() else {
                return Err(Error::Parse { path: path.to_path_buf(), line: hn, msg: "expected `m f`".into() });
            };
            if lines.len() < 1 + m {
                return Err(Error::Parse { path: path.to_path_buf(), line: hn, msg: "missing reference rows".into() });
            }
            let rows = lines[1..=m]
                .iter()
                .map(|&(n, l)| numbers::<f64>(l, path, n))
                .collect::<Result<Vec<_>>>()?;
            let reference = Matrix::from_rows(&rows).map_err(|e| at(hn + 1, e))?;
            if reference.cols() != f {
                return Err(Error::Parse { path: path.to_path_buf(), line: hn + 1, msg: format!("reference rows need {f} entries") });
            }
            let rounds = lines[1 + m..]
                .iter()
                .map(|&(n, l)| {
                    let (w, x) = split_bar(l, path, n)?;
                    let round = LogitRound { weights: numbers(w, path, n)?, features: numbers(x, path, n)? };
                    if round.weights.len() != m || round.features.len() != f {
                        return Err(Error::Parse { path: path.to_path_buf(), line: n, msg: format!("expected {m} weights and {f} features") });
                    }
                    Ok(round)
                })
                .collect::<Result<Vec<_>>>()?;
            Instances::Scheduling { rounds, reference }
        }
        Problem::RoundRobin => Instances::RoundRobin(
            lines
                .iter()
                .map(|&(n, l)| {
                    let (a, b) = split_bar(l, path, n)?;
                    RoundRobinInstance::new(numbers(a, path, n)?, numbers(b, path, n)?).map_err(|e| at(n, e))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        Problem::SkiDiscrete | Problem::SkiContinuous => {
            let seasons = crate::skirental::read_seasons_text(text, path)?;
            if problem == Problem::SkiDiscrete {
                Instances::SkiDiscrete(seasons)
            } else {
                Instances::SkiContinuous(seasons)
            }
        }
        Problem::Perm => Instances::Perm(crate::permutations::parse_batches(text, path)?),
    })
}
