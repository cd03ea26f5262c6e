use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use predlearn::harness::{run_experiment, summarize, ExperimentConfig, Problem, Summary};

/// Online learning of predictions for algorithms: run seeded regret
/// experiments and audit their CSV output.
#[derive(Parser)]
#[command(name = "predlearn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dual warm-starts for min-cost perfect matching.
    Matching(RunArgs),
    /// Dual warm-starts for min-cost b-matching.
    Bmatching(RunArgs),
    /// Predicted request sequences for page migration.
    Migration(RunArgs),
    /// Machine-weight logits for restricted assignment.
    Scheduling(RunArgs),
    /// Trade-off parameter of preferential round-robin.
    Rr(RunArgs),
    /// Buy threshold and trade-off for discrete ski rental.
    SkiDiscrete(RunArgs),
    /// Buy threshold and trade-off for continuous ski rental.
    SkiContinuous(RunArgs),
    /// Job orders for non-clairvoyant weighted scheduling.
    Perm(RunArgs),
    /// Per-trial regret, bound and verdict of an experiment CSV.
    Summarize {
        path: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Number of rounds.
    #[arg(long = "T", value_name = "N")]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// CSV destination; the resolved config goes to `<out>.cfg`. Without it
    /// the CSV is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(problem: Problem, args: RunArgs) -> Result<bool> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(t) = args.rounds {
        overrides.push(("T".into(), t.to_string()));
    }
    if let Some(s) = args.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(k) = args.trials {
        overrides.push(("trials".into(), k.to_string()));
    }
    for kv in &args.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, found {kv:?}");
        };
        overrides.push((k.trim().into(), v.trim().into()));
    }
    let config = ExperimentConfig::load(problem, &args.config, &overrides)?;
    let experiment = run_experiment(&config).with_context(|| format!("running {problem}"))?;
    let summary = Summary { trials: experiment.trials.clone(), bound_audited: true };
    match &args.out {
        Some(out) => {
            experiment.write(out)?;
            println!("{summary}");
        }
        None => {
            std::io::stdout().write_all(experiment.csv.as_bytes())?;
            eprintln!("{summary}");
        }
    }
    Ok(experiment.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Summarize { path } => summarize(&path).map_err(anyhow::Error::from).map(|s| {
            println!("{s}");
            s.all_pass()
        }),
        Command::Matching(a) => run(Problem::Matching, a),
        Command::Bmatching(a) => run(Problem::BMatching, a),
        Command::Migration(a) => run(Problem::Migration, a),
        Command::Scheduling(a) => run(Problem::Scheduling, a),
        Command::Rr(a) => run(Problem::RoundRobin, a),
        Command::SkiDiscrete(a) => run(Problem::SkiDiscrete, a),
        Command::SkiContinuous(a) => run(Problem::SkiContinuous, a),
        Command::Perm(a) => run(Problem::Perm, a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
