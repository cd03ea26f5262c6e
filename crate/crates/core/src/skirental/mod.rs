//! Ski rental with a learned prediction and a learned robustness-consistency
//! trade-off.
//!
//! Discrete seasons use an integer buy threshold `x` and the trade-off `λ`,
//! learned jointly by exponentiated gradient over a product grid. Continuous
//! seasons use a real threshold and an exponential forecaster over a 2-D grid,
//! which requires the season lengths to be dispersed.

mod continuous;
mod costs;
mod discrete;
mod dispersion;
mod template;

pub use continuous::{continuous_forecaster, ContinuousConfig, ContinuousRun};
pub use costs::{continuous_bound, continuous_cost, discrete_bound, discrete_cost, read_seasons, read_seasons_text, SkiSeason};
pub use discrete::{discrete_comparator, discrete_delta, discrete_grid_learner, DiscreteConfig};
pub use dispersion::{dispersion_check, dispersion_check_radius, DispersionReport};
pub use template::TradeoffTemplate;
