//! Online learning engines shared by every problem family.
//!
//! All step functions are pure: they take the current learner state by
//! reference and return the next one, so many learners can be advanced from
//! independent worker threads.

pub mod domain;
pub mod eg;
pub mod forecaster;
pub mod hindsight;
pub mod ktoco;
pub mod ledger;
pub mod lp;
pub mod ogd;
pub mod subgradient;

pub use domain::{BoxDomain, SimplexPoint};
pub use eg::eg_step;
pub use forecaster::{forecaster_sample, forecaster_update, GridDensity};
pub use hindsight::{best_in_hindsight_l1, online_to_batch, weighted_median};
pub use ktoco::{ktoco_step, CoinBettingState};
pub use ledger::{regret_report, RegretLedger, RegretReport, RoundRecord};
pub use ogd::ogd_step;
pub use subgradient::{l1_subgradient, linf_subgradient};

/// Absolute tolerance used for floating-point comparisons across the crate.
pub const TOL: f64 = 1e-9;
