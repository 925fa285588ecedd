//! Scalar abstraction shared by the exact and floating point code paths.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

use crate::dd::DoubleDouble;

/// Field operations needed by the coordinate transforms.
///
/// Transcendental functions are not required here; code that needs them
/// bounds on [`num_traits::Float`] in addition.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Relative tolerance below which a recurrence coefficient counts as zero.
    fn boundary_tolerance() -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn boundary_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn boundary_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }
    fn to_f64(&self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn boundary_tolerance() -> Self {
        DoubleDouble::from(1e-28)
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn boundary_tolerance() -> Self {
        BigRational::from_integer(0.into())
    }
}
