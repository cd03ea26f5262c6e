//! Online page migration with predicted request sequences.
//!
//! A page lives at one point of a finite metric space; serving request `s_j`
//! from state `a_j` costs `d(a_j, s_j)` and moving costs `D·d(a_{j−1}, a_j)`.
//! The learned object is a stack of per-timestep distributions over points,
//! scored by the worst window of expected mistakes.

mod dp;
mod lambert;
mod learner;
mod losses;
mod metric;

pub use dp::{lazy_predicted_run, offline_opt, trajectory_cost, Trajectory};
pub use lambert::{lambert_w, lemma2_bound};
pub use learner::{eg_sequence_learner, stack_comparator};
pub(crate) use losses::categorical;
pub use losses::{
    mistake_fraction, sample_predictions, window_loss, window_loss_subgradient, PredictionStack,
};
pub use metric::{read_metric, read_requests, MetricSpace, MigrationProblem};
