//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    Matching,
    BMatching,
    Migration,
    Scheduling,
    RoundRobin,
    SkiDiscrete,
    SkiContinuous,
    Perm,
}

impl Problem {
    pub const ALL: [Problem; 8] = [
        Problem::Matching,
        Problem::BMatching,
        Problem::Migration,
        Problem::Scheduling,
        Problem::RoundRobin,
        Problem::SkiDiscrete,
        Problem::SkiContinuous,
        Problem::Perm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Matching => "matching",
            Problem::BMatching => "bmatching",
            Problem::Migration => "migration",
            Problem::Scheduling => "scheduling",
            Problem::RoundRobin => "rr",
            Problem::SkiDiscrete => "ski-discrete",
            Problem::SkiContinuous => "ski-continuous",
            Problem::Perm => "perm",
        }
    }

    /// Problem-specific keys and their defaults.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Problem::Matching => &[("n", "10"), ("C", "5"), ("max_cost", "10"), ("noise", "2")],
            Problem::BMatching => &[("n", "10"), ("C", "5"), ("B", "3"), ("max_cost", "10"), ("noise", "2")],
            Problem::Migration => &[("n", "20"), ("K", "8"), ("window", "4"), ("noise", "0.2")],
            Problem::Scheduling => &[
                ("learner", "ogd"),
                ("m", "4"),
                ("f", "3"),
                ("B", "2"),
                ("norm", "3"),
                ("noise", "0.1"),
            ],
            Problem::RoundRobin => &[("B", "1"), ("jobs", "10"), ("grid", "512")],
            Problem::SkiDiscrete => &[("N", "20"), ("B", "10"), ("delta", "auto")],
            Problem::SkiContinuous => &[
                ("N", "20"),
                ("B", "10"),
                ("x_points", "401"),
                ("lambda_points", "200"),
                ("c1", "1"),
                ("c2", "1"),
                ("beta", "0.5"),
                ("dispersion_c", "4"),
            ],
            Problem::Perm => &[("n", "5"), ("W", "1"), ("P", "1")],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Iid,
    Drifting,
    Adversarial,
    File,
}

impl FromStr for StreamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(StreamKind::Iid),
            "drifting" => Ok(StreamKind::Drifting),
            "adversarial" => Ok(StreamKind::Adversarial),
            "file" => Ok(StreamKind::File),
            _ => Err(Error::Config(format!("unknown stream kind {s:?}"))),
        }
    }
}

/// Keys every problem accepts. `breakpoint = auto` means `T / 2`; `step =
/// auto` keeps the learner's default step size; `threads = 0` lets the
/// worker pool pick.
const COMMON: &[(&str, &str)] = &[
    ("T", "1000"),
    ("seed", "0"),
    ("trials", "1"),
    ("stream", "iid"),
    ("breakpoint", "auto"),
    ("input", ""),
    ("step", "auto"),
    ("threads", "0"),
];

/// A resolved configuration: every key of the problem is present.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    problem: Problem,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Defaults for `problem`, then `pairs` applied in order.
    pub fn new<'a>(problem: Problem, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut values: BTreeMap<String, String> = COMMON
            .iter()
            .chain(problem.defaults())
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        for (k, v) in pairs {
            if k == "problem" {
                if v.parse::<Problem>()? != problem {
                    return Err(Error::Config(format!("config names problem {v:?}, expected {problem}")));
                }
                continue;
            }
            let slot = values
                .get_mut(k)
                .ok_or_else(|| Error::Config(format!("unknown key {k:?} for problem {problem}")))?;
            *slot = v.to_string();
        }
        let config = ExperimentConfig { problem, values };
        config.validate()?;
        Ok(config)
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected `key = value`, found {line:?}"),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    /// Reads a config file and applies `overrides` on top of it.
    pub fn load(problem: Problem, path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Self::parse_pairs(&text, path)?;
        pairs.extend(overrides.iter().cloned());
        Self::new(problem, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        let slot = self
            .values
            .get_mut(key)
            .ok_or_else(|| Error::Config(format!("unknown key {key:?} for problem {}", self.problem)))?;
        *slot = value.to_string();
        self.validate()
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map_or("", String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| Error::Config(format!("key {key:?}: cannot parse {raw:?}")))
    }

    /// `None` for the value `auto`.
    pub fn get_auto<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        if self.raw(key) == "auto" {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn rounds(&self) -> usize {
        self.get("T").expect("validated")
    }

    pub fn seed(&self) -> u64 {
        self.get("seed").expect("validated")
    }

    pub fn trials(&self) -> usize {
        self.get("trials").expect("validated")
    }

    pub fn stream(&self) -> StreamKind {
        self.get("stream").expect("validated")
    }

    pub fn step(&self) -> Option<f64> {
        self.get_auto("step").expect("validated")
    }

    pub fn threads(&self) -> usize {
        self.get("threads").expect("validated")
    }

    /// Round at which drifting streams switch their ground truth.
    pub fn breakpoint(&self) -> usize {
        self.get_auto("breakpoint").expect("validated").unwrap_or(self.rounds() / 2)
    }

    pub fn input(&self) -> Option<PathBuf> {
        let raw = self.raw("input");
        (!raw.is_empty()).then(|| PathBuf::from(raw))
    }

    /// Every key in sorted order, one `key = value` line each.
    pub fn to_text(&self) -> String {
        let mut out = format!("problem = {}\n", self.problem);
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.get::<usize>("T")?;
        self.get::<u64>("seed")?;
        if self.get::<usize>("trials")? == 0 {
            return bad("trials must be at least 1".into());
        }
        self.get::<usize>("threads")?;
        self.get_auto::<usize>("breakpoint")?;
        if let Some(s) = self.get_auto::<f64>("step")? {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("step must be positive, found {s}"));
            }
        }
        if self.get::<StreamKind>("stream")? == StreamKind::File && self.input().is_none() {
            return bad("stream = file needs an input path".into());
        }
        let positive = |key: &str| -> Result<f64> {
            let v: f64 = self.get(key)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be positive, found {v}")));
            }
            Ok(v)
        };
        let at_least = |key: &str, min: usize| -> Result<usize> {
            let v: usize = self.get(key)?;
            if v < min {
                return Err(Error::Config(format!("{key} must be at least {min}, found {v}")));
            }
            Ok(v)
        };
        match self.problem {
            Problem::Matching | Problem::BMatching => {
                let n = at_least("n", 2)?;
                if n % 2 != 0 {
                    return bad(format!("n counts nodes on both sides and must be even, found {n}"));
                }
                positive("C")?;
                self.get::<i64>("max_cost")?;
                self.get::<i64>("noise")?;
                if self.problem == Problem::BMatching {
                    at_least("B", 1)?;
                }
            }
            Problem::Migration => {
                let n = at_least("n", 1)?;
                at_least("K", 2)?;
                let w = at_least("window", 1)?;
                if w > n {
                    return bad(format!("window {w} exceeds sequence length {n}"));
                }
                let noise: f64 = self.get("noise")?;
                if !(0.0..=1.0).contains(&noise) {
                    return bad("noise must lie in [0, 1]".into());
                }
            }
            Problem::Scheduling => {
                let learner = self.raw("learner");
                if learner != "ogd" && learner != "ktoco" {
                    return bad(format!("learner must be ogd or ktoco, found {learner:?}"));
                }
                let m = at_least("m", 1)?;
                let f = at_least("f", 1)?;
                let cap = positive("B")?;
                let norm = positive("norm")?;
                if norm > cap * ((m * f) as f64).sqrt() {
                    return bad(format!("norm {norm} unreachable with entries capped at {cap}"));
                }
                if self.get::<f64>("noise")? < 0.0 {
                    return bad("noise must be nonnegative".into());
                }
            }
            Problem::RoundRobin => {
                positive("B")?;
                at_least("jobs", 1)?;
                at_least("grid", 2)?;
            }
            Problem::SkiDiscrete => {
                at_least("N", 2)?;
                if positive("B")? < 1.0 {
                    return bad("B must be at least 1".into());
                }
                if let Some(d) = self.get_auto::<f64>("delta")? {
                    if !(d > 0.0 && d <= 1.0) {
                        return bad("delta must lie in (0, 1]".into());
                    }
                }
            }
            Problem::SkiContinuous => {
                if positive("N")? <= 1.0 {
                    return bad("N must exceed 1".into());
                }
                positive("B")?;
                at_least("x_points", 2)?;
                at_least("lambda_points", 1)?;
                self.get::<f64>("c1")?;
                self.get::<f64>("c2")?;
                let beta = positive("beta")?;
                if beta > 1.0 {
                    return bad("beta must lie in (0, 1]".into());
                }
                positive("dispersion_c")?;
            }
            Problem::Perm => {
                let n = at_least("n", 1)?;
                if n > crate::permutations::MAX_JOBS {
                    return bad(format!("n = {n} exceeds the enumeration cap"));
                }
                positive("W")?;
                positive("P")?;
            }
        }
        Ok(())
    }
}
