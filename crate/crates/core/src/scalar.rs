//! Scalar abstractions shared by the series, matrix and ODE code.
//!
//! Precision-carrying types such as [`BigComplex`](crate::BigComplex) cannot
//! produce a meaningful `zero()` out of thin air, so constants are built
//! "like" an existing value and inherit its precision.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::Rational;

/// Ring operations plus the constructors the generic code needs.
pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The additive identity at the same precision as `self`.
    fn zero_like(&self) -> Self;

    fn from_i64_like(&self, n: i64) -> Self;

    fn from_rational_like(&self, q: &Rational) -> Self;

    /// True only for an exact zero (never for "small").
    fn is_exact_zero(&self) -> bool;

    /// Absolute value as an `f64`; may underflow to zero for tiny values.
    fn magnitude(&self) -> f64;

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }
}

/// A [`Scalar`] with exact or rounded division.
pub trait Field: Scalar + Div<Output = Self> {
    fn recip(&self) -> Self {
        self.one_like() / self.clone()
    }
}

/// Complex scalars with transcendental functions, used by the numerical
/// continuation code.
pub trait ComplexField: Field {
    /// Working precision in bits (53 for `f64`-backed types).
    fn precision_bits(&self) -> u32;

    /// Exact conversion of a pair of doubles at the precision of `self`.
    fn from_f64_parts_like(&self, re: f64, im: f64) -> Self;

    fn re_f64(&self) -> f64;

    fn im_f64(&self) -> f64;

    /// Principal branch of the logarithm.
    fn ln(&self) -> Self;

    fn exp(&self) -> Self;

    /// `2πi` at the precision of `self`.
    fn two_pi_i_like(&self) -> Self;

    /// `log2 |self|`, finite even when `magnitude` would underflow.
    /// Returns `f64::NEG_INFINITY` for zero.
    fn log2_magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn from_i64_like(&self, n: i64) -> Self {
        n as f64
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Field for f64 {}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Rational::from_integer(n.into())
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Field for Rational {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_constants() {
        let x = Rational::new(3.into(), 7.into());
        assert!(x.zero_like().is_exact_zero());
        assert_eq!(x.one_like(), Rational::from_integer(1.into()));
        assert_eq!(x.recip(), Rational::new(7.into(), 3.into()));
        assert!((x.magnitude() - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn f64_constants() {
        let x = 2.5f64;
        assert_eq!(x.from_rational_like(&Rational::new(1.into(), 4.into())), 0.25);
        assert_eq!(x.recip(), 0.4);
    }
}
