//! Statistical and deterministic checks that produce [`GofReport`]s.

mod ks;
mod mc;
mod report;
mod scaling;
mod suites;

pub use ks::{
    kolmogorov_survival, ks_one_sample, ks_statistic_one_sample, ks_statistic_two_sample, ks_two_sample,
};
pub use mc::{mc_transform_check, mean_and_standard_error};
pub use report::{summarize, GofReport, Threshold, Verdict};
pub use scaling::{
    corollary_curve, scaled_spider_cdf, scaling_reports, squared_cauchy_cdf, ConvergencePoint,
    SCALING_BOUND_AT_64, SCALING_N,
};
pub use suites::*;
