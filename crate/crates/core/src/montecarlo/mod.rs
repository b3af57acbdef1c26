//! Experiment orchestration: logical error estimates, threshold crossings,
//! scaling fits and the error-hierarchy comparison.

pub mod experiment;
pub mod hierarchy;
pub mod scaling;
pub mod stats;
pub mod threshold;

pub use experiment::{
    derive_seed, estimate_logical_error, estimate_with_budget, with_workers, EstimateRow,
    NoiseModel, NoisePoint, PreparedPoint, ShotBudget,
};
pub use hierarchy::{d2_single_event_census, hierarchy_experiment, Census, HierarchyReport};
pub use scaling::{fit_scaling_exponent, ScalingFit};
pub use stats::{binomial_sigma, least_squares, percentile, wilson_interval, LinearFit};
pub use threshold::{find_threshold, RatePoint, ThresholdReport};
