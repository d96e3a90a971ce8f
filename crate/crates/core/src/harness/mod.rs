//! Monte Carlo driver: scenario description, single-packet trials and
//! parallel sweeps with confidence intervals.

mod metrics;
mod scenario;
mod sweep;
mod trial;

pub use metrics::{binomial_half_width, channel_mse, mean_half_width, phase_invariant_mse, pooled_half_width, smooth};
pub use scenario::{Algorithm, ChannelEstimatorMode, CovarianceSource, EstimatorCovariance, Scenario};
pub use sweep::{
    packet_points, run_trials, scenario_at, seed_list_hash, sweep, sweep_with_seeds, sweep_with_trials, symbol_points, trial_seeds, Axis,
    Metric, MetricsSeries, SeriesPoint, CHANNEL_SERIES,
};
pub use trial::{model_covariance, run_trial, TrialOutcome, FILTER_NORM_LIMIT};
