//! Floating-point scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use num_complex::Complex;

/// Real sample type: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + realfft::FftNum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Index or count as a scalar.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wrap a phase to the half-open interval (-pi, pi].
pub fn wrap_phase<T: Real>(phase: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut p = phase % two_pi;
    if p > T::PI() {
        p -= two_pi;
    } else if p <= -T::PI() {
        p += two_pi;
    }
    p
}

/// Sum of squares accumulated in `f64` regardless of `T`.
pub fn energy<T: Real>(xs: &[T]) -> f64 {
    xs.iter().map(|&x| {
        let v = x.to_f64_lossy();
        v * v
    }).sum()
}
