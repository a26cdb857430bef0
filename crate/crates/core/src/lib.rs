//! Occupation-time laws of Walsh Brownian motion (the Brownian spider) and of
//! ratios of one-sided stable variables.
//!
//! The crate has four parts:
//!
//! * [`sampler`]: exact samplers for the stable, ratio and occupation laws;
//! * [`closed_form`]: densities, distribution functions and transforms,
//!   generic over the floating-point type;
//! * [`spider`]: a lattice random walk on `n` rays with three stopping rules;
//! * [`verify`]: Kolmogorov–Smirnov and Monte-Carlo checks that turn the
//!   above into pass/fail reports.

pub mod closed_form;
pub mod error;
pub mod export;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod special;
pub mod spider;
pub mod verify;

pub use closed_form::{DensityCurve, LawSpec};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use sampler::{SimplexVector, StableParams};
pub use scalar::Real;

/// Density curve in double precision.
pub type DensityCurve64 = DensityCurve<f64>;
/// Density curve in single precision.
pub type DensityCurve32 = DensityCurve<f32>;
