//! Min-weight perfect matching and b-matching warm-started from predicted duals.
//!
//! The learning target is the optimal dual vector `x*(c)` of the assignment
//! LP; a prediction `x̂` is rounded, repaired into a feasible dual and handed to
//! a primal-dual (Hungarian) solver whose iteration count is recorded.

mod bmatching;
mod instance;
pub mod io;
mod learn;
mod rounding;
mod solver;

pub use bmatching::{b_matching_solve, validate_demand};
pub use instance::{BipartiteInstance, Edge};
pub use learn::{linf_dual_learner, ogd_dual_learner};
pub use rounding::{dual_error, round_to_integer, DualNorm};
pub use solver::{hungarian_solve, repair_duals, solve_from_duals, warmstart_solve, SolveReport};
