//! Exact moments, growth-rate checks, covariance estimates and Monte Carlo
//! standardized moments.

mod engine;
mod growth;
mod mc;
mod sigma;

pub use engine::{exact_moment_series, MomentEngine};
pub use growth::{
    default_grid, log_factor, log_factor_necessary, verify_momq, verify_power_moments, BoundKind, GrowthReport,
};
pub use mc::{
    gaussian_moment, mc_standardized_moments, sample_observable, standardized_moments, McConfig, McReport,
    StandardizedMoment,
};
pub use sigma::{DEGENERACY_TOL, color_covariance, direction_variance, estimate_sigma, observable, observable_moments, CovarianceEstimate};
