//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the library can compute in: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and sampled values.
    fn of(x: f64) -> Self;

    /// Widening conversion, used for serialization and reporting.
    fn as_f64(self) -> f64;

    /// Relative machine epsilon scaled to the size of a small dense problem.
    fn work_eps() -> Self {
        Self::epsilon() * Self::of(64.0)
    }
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Scalar>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Scalar>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn from_usize<T: Scalar>(n: usize) -> T {
    T::of(n as f64)
}
