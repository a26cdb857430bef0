//! Scalar abstraction for the deterministic numerics.
//!
//! Closed-form laws, the gamma function and the quadrature rules are written
//! once against [`Real`] and instantiated for `f32` and `f64`. The Monte-Carlo
//! side (samplers, lattice walk) is `f64` only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the closed-form and quadrature code.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`, rounding if needed.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Lossy conversion to `f64` (used for error messages and reports).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
