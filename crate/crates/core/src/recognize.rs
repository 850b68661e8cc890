//! Recognition of floats as small-denominator rationals by continued
//! fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rug::Float;

use crate::rational::{float_to_rational, Rational};

/// Default acceptance threshold `2^(−prec/2)` for a value carried at `prec` bits.
pub fn recognition_tolerance(prec: u32) -> Float {
    let mut t = Float::with_val(64, 1);
    t >>= prec / 2;
    t
}

/// Smallest-denominator continued-fraction convergent `p/q` of `x` with
/// `q ≤ bound` and `|x − p/q| < 2^(−prec/2)`, where `prec` is the
/// precision of `x`.
pub fn rational_reconstruct(x: &Float, bound: &BigInt) -> Option<Rational> {
    rational_reconstruct_within(x, bound, &recognition_tolerance(x.prec()))
}

/// As [`rational_reconstruct`] with an explicit tolerance.
pub fn rational_reconstruct_within(x: &Float, bound: &BigInt, tolerance: &Float) -> Option<Rational> {
    if !bound.is_positive() {
        return None;
    }
    let target = float_to_rational(x)?;
    let tol = float_to_rational(tolerance)?;
    // Expand |x| so that reconstruction commutes with negation.
    let magnitude = target.abs();
    let found = convergents(&magnitude)
        .take_while(|c| c.denom() <= bound)
        .find(|c| (c - &magnitude).abs() < tol)?;
    Some(if target.is_negative() { -found } else { found })
}

/// Continued-fraction convergents of an exact rational, ending with the
/// rational itself.
pub fn convergents(x: &Rational) -> impl Iterator<Item = Rational> {
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    std::iter::from_fn(move || {
        if den.is_zero() {
            return None;
        }
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        num = std::mem::replace(&mut den, r);
        Some(Rational::new(h.clone(), k.clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn f(x: f64) -> Float {
        Float::with_val(53, x)
    }

    #[test]
    fn simple_fractions() {
        assert_eq!(rational_reconstruct(&f(0.2), &BigInt::from(10)), Some(rat(1, 5)));
        assert_eq!(rational_reconstruct(&f(0.333333333333), &BigInt::from(100)), Some(rat(1, 3)));
        assert_eq!(rational_reconstruct(&f(-2.5), &BigInt::from(3)), Some(rat(-5, 2)));
        assert_eq!(rational_reconstruct(&f(0.0), &BigInt::from(3)), Some(rat(0, 1)));
    }

    #[test]
    fn negation_commutes() {
        for x in [0.3, 0.7142857142857143, 1e-3, 12.25] {
            let b = BigInt::from(1000);
            let pos = rational_reconstruct(&f(x), &b).unwrap();
            assert_eq!(rational_reconstruct(&f(-x), &b), Some(-pos));
        }
    }

    #[test]
    fn golden_fraction_fails_at_tight_tolerance() {
        let tol = Float::with_val(64, 1e-15);
        let x = f(0.6180339887);
        assert_eq!(rational_reconstruct_within(&x, &BigInt::from(100), &tol), None);
        // Brute force over every denominator confirms nothing small is close.
        for q in 1..=100i64 {
            let p = (0.6180339887 * q as f64).round();
            assert!((0.6180339887 - p / q as f64).abs() > 1e-15);
        }
    }

    #[test]
    fn convergents_of_known_fraction() {
        let cs: Vec<_> = convergents(&rat(415, 93)).collect();
        assert_eq!(cs, vec![rat(4, 1), rat(9, 2), rat(58, 13), rat(415, 93)]);
        let neg: Vec<_> = convergents(&rat(-7, 3)).collect();
        assert_eq!(neg.last(), Some(&rat(-7, 3)));
    }

    #[test]
    fn bound_must_be_positive() {
        assert_eq!(rational_reconstruct(&f(0.5), &BigInt::zero()), None);
    }
}
