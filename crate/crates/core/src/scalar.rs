//! Scalar abstraction for the numeric core.
//!
//! All fixed-point, polynomial, and finite-volume arithmetic is generic over
//! [`Real`], so the same code runs in `f32` or `f64`. The documented
//! tolerances assume `f64`; concrete aliases live at the crate root.

use core::fmt::{Debug, Display};
use core::iter::Sum;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the crate is generic over (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn cst<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant must be representable in the scalar type")
}

/// Converts a count or exponent into the working scalar type.
pub(crate) fn int<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("count must be representable in the scalar type")
}
