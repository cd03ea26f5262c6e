//! Linear predictors driven by instance features.
//!
//! A feature vector always lives in a simplex, so a matrix predictor `A`
//! produces `A·f`, a convex combination of its columns. That keeps dual
//! predictions inside the entrywise box of `A` and distribution predictions
//! inside the simplex when the columns are distributions. No intercept is
//! learned; one can be emulated by appending a constant coordinate to the
//! features and rescaling.

mod autoregressive;
mod linear;
mod stochastic;

pub use autoregressive::{autoregressive_features, read_features};
pub use linear::{feature_ogd_learner, predict_duals, FeatureRound};
pub use stochastic::{predict_distributions, shared_map_learner, stacked_map_learner, MigrationRound, StochasticStack};
