//! Approximate maximum-likelihood estimation of the granularity θ for
//! doubly-intractable fields, and a replicate harness that compares the
//! estimator's empirical variance with the Cramér-Rao bound.

mod benchmark;
mod exchange;
mod kde;

pub use benchmark::{
    replicate_benchmark, sample_mean_variance, simulate_field, BenchmarkConfig,
    EstimatorBenchmark, ExchangeMl, ThetaEstimator,
};
pub use exchange::{
    exchange_log_acceptance, exchange_posterior, ExchangeConfig, PosteriorRun, LOW_ACCEPTANCE,
};
pub use kde::{
    kde_argmax, ml_from_samples, silverman_bandwidth, Bandwidth, MlEstimate, KDE_GRID_POINTS,
    MIN_KDE_SAMPLES,
};
