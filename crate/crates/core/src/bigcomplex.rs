//! Precision-tagged complex floats on top of MPFR.
//!
//! Binary operations produce a result at the smaller of the two input
//! precisions.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use rug::float::Constant;
use rug::Float;

use crate::rational::{rational_to_float, Rational};
use crate::scalar::{ComplexField, Field, Scalar};

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    /// Both parts are rounded to the smaller of their precisions.
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().min(im.prec());
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(x: Float) -> Self {
        let prec = x.prec();
        BigComplex { re: x, im: Float::new(prec) }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        BigComplex {
            re: rational_to_float(q, prec),
            im: Float::new(prec),
        }
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        BigComplex {
            re: rational_to_float(re, prec),
            im: rational_to_float(im, prec),
        }
    }

    pub fn i(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), &self.re * &self.re + &self.im * &self.im)
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, x: &Float) -> Self {
        let prec = self.prec().min(x.prec());
        BigComplex {
            re: Float::with_val(prec, &self.re * x),
            im: Float::with_val(prec, &self.im * x),
        }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        BigComplex {
            re: Float::with_val(self.prec(), &self.re * n),
            im: Float::with_val(self.prec(), &self.im * n),
        }
    }

    pub fn div_i64(&self, n: i64) -> Self {
        BigComplex {
            re: Float::with_val(self.prec(), &self.re / n),
            im: Float::with_val(self.prec(), &self.im / n),
        }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Scientific rendering with `digits` significant decimal digits per part.
    pub fn to_string_digits(&self, digits: usize) -> String {
        // signed zeros render as 0
        let part = |x: &Float| if x.is_zero() { "0".to_string() } else { x.to_string_radix(10, Some(digits)) };
        let (re, im) = (part(&self.re), part(&self.im));
        if self.im.is_sign_negative() && !self.im.is_zero() {
            format!("{re} - {}i", im.trim_start_matches('-'))
        } else {
            format!("{re} + {im}i")
        }
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigComplex({}, prec={})", self.to_string_digits(20), self.prec())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
        f.write_str(&self.to_string_digits(digits.max(1)))
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec().min(rhs.prec());
        BigComplex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec().min(rhs.prec());
        BigComplex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec().min(rhs.prec());
        BigComplex {
            re: Float::with_val(prec, &self.re * &rhs.re - &self.im * &rhs.im),
            im: Float::with_val(prec, &self.re * &rhs.im + &self.im * &rhs.re),
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec().min(rhs.prec());
        let work = prec + 16;
        let den = Float::with_val(work, &rhs.re * &rhs.re + &rhs.im * &rhs.im);
        let re = Float::with_val(work, &self.re * &rhs.re + &self.im * &rhs.im);
        let im = Float::with_val(work, &self.im * &rhs.re - &self.re * &rhs.im);
        BigComplex {
            re: Float::with_val(prec, re / &den),
            im: Float::with_val(prec, im / &den),
        }
    }
}

impl<'a> Neg for &'a BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re, im: -self.im }
    }
}

impl Scalar for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.prec())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigComplex::from_real(Float::with_val(self.prec(), n))
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        BigComplex::from_rational(self.prec(), q)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64()
    }
}

impl Field for BigComplex {}

impl ComplexField for BigComplex {
    fn precision_bits(&self) -> u32 {
        self.prec()
    }
    fn from_f64_parts_like(&self, re: f64, im: f64) -> Self {
        BigComplex::from_f64(self.prec(), re, im)
    }
    fn re_f64(&self) -> f64 {
        self.re.to_f64()
    }
    fn im_f64(&self) -> f64 {
        self.im.to_f64()
    }
    fn ln(&self) -> Self {
        let prec = self.prec();
        let work = prec + 16;
        let abs = Float::with_val(work, self.re.hypot_ref(&self.im));
        BigComplex {
            re: Float::with_val(prec, abs.ln()),
            im: Float::with_val(prec, self.im.atan2_ref(&self.re)),
        }
    }
    fn exp(&self) -> Self {
        let prec = self.prec();
        let work = prec + 16;
        let r = Float::with_val(work, self.re.exp_ref());
        let (s, c) = Float::with_val(work, &self.im).sin_cos(Float::new(work));
        BigComplex {
            re: Float::with_val(prec, &r * &c),
            im: Float::with_val(prec, &r * &s),
        }
    }
    fn two_pi_i_like(&self) -> Self {
        two_pi_i(self.prec())
    }
    fn log2_magnitude(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let a = Float::with_val(64, self.re.hypot_ref(&self.im));
        let (m, e) = a.to_f64_exp();
        m.log2() + e as f64
    }
}

fn cached(cache: &'static OnceLock<RwLock<HashMap<u32, Float>>>, prec: u32, f: impl FnOnce() -> Float) -> Float {
    let lock = cache.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = lock.read().expect("constant cache poisoned").get(&prec) {
        return v.clone();
    }
    let v = f();
    lock.write().expect("constant cache poisoned").insert(prec, v.clone());
    v
}

/// π at `prec` bits, cached per precision.
pub fn pi(prec: u32) -> Float {
    static CACHE: OnceLock<RwLock<HashMap<u32, Float>>> = OnceLock::new();
    cached(&CACHE, prec, || Float::with_val(prec, Constant::Pi))
}

/// ζ(3) at `prec` bits, cached per precision.
pub fn zeta3(prec: u32) -> Float {
    static CACHE: OnceLock<RwLock<HashMap<u32, Float>>> = OnceLock::new();
    cached(&CACHE, prec, || Float::with_val(prec, Float::zeta_u(3)))
}

pub fn two_pi_i(prec: u32) -> BigComplex {
    BigComplex {
        re: Float::new(prec),
        im: Float::with_val(prec, pi(prec) * 2u32),
    }
}

/// κ = ζ(3)/(2πi)³ = i·ζ(3)/(8π³), a purely imaginary constant.
pub fn kappa(prec: u32) -> BigComplex {
    BigComplex {
        re: Float::new(prec),
        im: kappa_im(prec),
    }
}

/// Imaginary part of κ, `ζ(3)/(8π³)`.
pub fn kappa_im(prec: u32) -> Float {
    let work = prec + 32;
    let p = pi(work);
    let den = Float::with_val(work, &p * &p) * &p * 8u32;
    Float::with_val(prec, zeta3(work) / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_takes_min_precision() {
        let a = BigComplex::from_f64(100, 1.0, 2.0);
        let b = BigComplex::from_f64(200, 3.0, -1.0);
        let c = &a * &b;
        assert_eq!(c.prec(), 100);
        assert_eq!(c.re().to_f64(), 5.0);
        assert_eq!(c.im().to_f64(), 5.0);
        let d = &c / &b;
        assert!((d.re_f64() - 1.0).abs() < 1e-25 && (d.im_f64() - 2.0).abs() < 1e-25);
        assert_eq!((&a + &b).prec(), 100);
    }

    #[test]
    fn exp_ln_inverse() {
        let z = BigComplex::from_f64(256, -0.75, 2.5);
        let w = z.ln().exp();
        let err = (&w - &z).abs().to_f64();
        assert!(err < 1e-70, "{err}");
        let neg = BigComplex::from_f64(128, -1.0, 0.0).ln();
        assert!((neg.im_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn kappa_is_purely_imaginary() {
        let k = kappa(300);
        assert!(k.re().is_zero());
        // ζ(3)/(8π³) ≈ 0.0048457...
        assert!((k.im_f64() - 1.2020569031595942 / (8.0 * std::f64::consts::PI.powi(3))).abs() < 1e-17);
        let direct = &BigComplex::from_real(zeta3(300)) / &two_pi_i(300).powi(3);
        assert!((&direct - &k).abs().to_f64() < 1e-85);
    }

    #[test]
    fn log2_magnitude_handles_tiny_values() {
        let mut x = Float::with_val(128, 1);
        x >>= 3000;
        let z = BigComplex::from_real(x);
        assert!((z.log2_magnitude() + 3000.0).abs() < 1e-9);
        assert_eq!(BigComplex::zero(64).log2_magnitude(), f64::NEG_INFINITY);
    }
}
