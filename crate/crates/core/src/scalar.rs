//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the operators and zeta evaluators are generic over.
///
/// Implemented for `f32` and `f64`. All published tolerances assume `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug + std::fmt::LowerExp
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `2^n` as a real, computed exactly through `powi`.
#[inline]
pub(crate) fn pow2<T: Real>(n: i32) -> T {
    T::lit(2.0).powi(n)
}

/// Integer power of a complex number by repeated squaring.
pub fn cpowi<T: Real>(z: C<T>, mut n: u32) -> C<T> {
    let mut acc = cone::<T>();
    let mut base = z;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}
