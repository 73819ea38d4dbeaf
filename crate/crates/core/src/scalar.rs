//! Floating-point scalar abstraction shared by the matrix and mean routines.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// `max(base, k·ε)`: an absolute tolerance that never drops below a few
    /// units of roundoff for the concrete type.
    fn tol(base: f64, ulps: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(ulps);
        Self::lit(base).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `max(v, 0)`.
#[inline]
pub fn positive_part<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        v
    } else {
        T::zero()
    }
}

/// `max(-v, 0)`. A zero eigenvalue counts as nonnegative.
#[inline]
pub fn negative_part<T: Scalar>(v: T) -> T {
    if v < T::zero() {
        -v
    } else {
        T::zero()
    }
}
