//! Scheduling with predictions.
//!
//! Restricted assignment: predicted machine-weight logits are scored by
//! `‖x − log w‖_∞` against the planted good weights, and learned as a linear
//! map of instance features. Non-clairvoyant scheduling: the preferential
//! round-robin trade-off `λ` is tuned online by an exponential forecaster on
//! the competitive-ratio bound.

mod assignment;
mod flow;
mod forecaster;
mod logit;
mod roundrobin;

pub use assignment::{fractional_assign, read_assignment, AssignmentInstance, Job};
pub use flow::{offline_fractional_opt, MaxFlow};
pub use forecaster::{best_fixed_lambda, lambda_forecaster, ratio_bound_closed};
pub use logit::{
    best_bounded_logit_map, ktoco_logit_learner, logit_loss, ogd_bounded_matrix_learner, planted_logit_map, truncated_logit_loss,
    LogitRound,
};
pub use roundrobin::{read_round_robin, rr_bound, rr_simulate, spt_total_completion, RoundRobinInstance};
