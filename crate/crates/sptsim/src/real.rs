//! Scalar abstraction for the simulation engine.
//!
//! Everything numeric in the engine is generic over [`Real`], so the same
//! code runs in `f32` or `f64`. Tolerances scale with the precision of the
//! scalar; the values used for `f64` are the ones quoted throughout the
//! operation contracts.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable as the amplitude component type.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Send + Sync + Debug + Display + 'static
{
    /// Tolerance for unitarity and state-norm checks.
    fn tol_strict() -> Self;

    /// Tolerance for trace, hermiticity and Kraus-completeness checks.
    fn tol_channel() -> Self;

    /// Shorthand for lossless-enough conversion from `f64` constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }
}

impl Real for f64 {
    fn tol_strict() -> f64 {
        1e-12
    }
    fn tol_channel() -> f64 {
        1e-10
    }
}

impl Real for f32 {
    fn tol_strict() -> f32 {
        1e-5
    }
    fn tol_channel() -> f32 {
        1e-4
    }
}
