use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision exact rational: always in lowest terms with a
/// positive denominator (maintained by `num::BigRational` itself).
pub type Rational = BigRational;

/// Coefficient domain for truncated power series.
///
/// Implemented by [`Rational`] (the default, used everywhere exactness
/// matters) and by `f64` (the optional double-precision backend for
/// large-size law tables). Only the exact backend is used when checking
/// coefficient identities.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign<Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// True for coefficients that count something (used by positivity checks).
    fn is_negative(&self) -> bool;
}

impl Coeff for Rational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational out of f64 range")
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

/// Exact rational from an integer pair, convenience for tests.
#[cfg(test)]
pub(crate) fn rat(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}
