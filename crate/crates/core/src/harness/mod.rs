//! Experiment orchestration: configuration, seeded instance streams, the
//! learner loop of every problem, CSV output and summaries.
//!
//! A run writes one CSV row per (trial, round) with the columns
//! `trial,t,loss,cum_loss,comparator_loss,regret,bound,action_digest`, plus a
//! `<out>.cfg` file holding the fully resolved configuration so that
//! [`summarize`] can recompute the bound column.

mod bounds;
mod config;
mod run;
mod stream;
mod summary;

pub use bounds::{bounds_agree, closed_form_bound};
pub use config::{ExperimentConfig, Problem, StreamKind};
pub use run::{action_digest, run_experiment, sidecar_path, ExperimentRun, TrialSummary, CSV_HEADER};
pub use stream::{
    bmatching_targets, format_stream, generate, matching_targets, parse_stream, read_stream, trial_rng, write_stream,
    InstanceStream, Instances,
};
pub use summary::{summarize, summarize_text, Summary};
