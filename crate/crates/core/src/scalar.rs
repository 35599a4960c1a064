//! Scalar abstraction for the closed-form parts of the crate.
//!
//! Grid solvers and quadrature run in `f64`; formulas that are plain algebra
//! (constants, bubble profiles, kernel elements, ball Green functions) are
//! written once against [`Real`] so they can be evaluated in `f32` too.

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use std::fmt::Debug;

pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Send + Sync + 'static
{
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Squared Euclidean distance between two points of equal dimension.
#[inline]
pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

#[inline]
pub fn norm2<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
