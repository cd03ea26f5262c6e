//! Learning the predictions consumed by algorithms with predictions.
//!
//! Each problem family exposes a convex (or Lipschitz) upper bound `U_t` on the
//! cost of a prediction-aided algorithm, built from feedback revealed after the
//! instance is solved. The [`learners`] module supplies the online learners that
//! minimize regret over those bounds, and [`harness`] wires generators,
//! learners and regret ledgers into reproducible CSV experiments.
//!
//! | module | upper bound | learner |
//! |---|---|---|
//! | [`matching`] | `‖x − x*(c)‖₁` on warm-start duals | projected OGD |
//! | [`migration`] | max windowed expected mistakes | EG per timestep |
//! | [`scheduling`] | `‖x − log w‖_∞`, round-robin ratio | KT-OCO / OGD, exponential forecaster |
//! | [`skirental`] | robustness-consistency bounds | EG on a product grid, exponential forecaster |
//! | [`features`] | linear maps from instance features | OGD / column-wise EG |
//! | [`permutations`] | permutation error | EG over all permutations |

pub mod error;
pub mod features;
pub mod harness;
pub mod learners;
pub mod matching;
pub mod matrix;
pub mod migration;
pub mod permutations;
pub mod scheduling;
pub mod skirental;

pub use error::{Error, Result};
pub use learners::ledger::{RegretLedger, RegretReport, RoundRecord};
pub use matrix::Matrix;
