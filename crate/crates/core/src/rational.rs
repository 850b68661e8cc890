//! Exact rationals and conversions to and from the MPFR-backed types.

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rug::integer::Order;
use rug::{Float, Integer};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"7"`, `"-25/6"` or `"+3/4"`; whitespace around the parts is allowed.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = num.strip_prefix('+').unwrap_or(num);
    if num.is_empty() || den.is_empty() || den.starts_with(['-', '+']) {
        return Err(err());
    }
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub(crate) fn bigint_to_rug(n: &BigInt) -> Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut out = Integer::from_digits(&digits, Order::Lsf);
    if sign == Sign::Minus {
        out = -out;
    }
    out
}

pub(crate) fn rug_to_bigint(n: &Integer) -> BigInt {
    let digits = n.to_digits::<u32>(Order::Lsf);
    let sign = match n.cmp0() {
        std::cmp::Ordering::Less => Sign::Minus,
        std::cmp::Ordering::Equal => Sign::NoSign,
        std::cmp::Ordering::Greater => Sign::Plus,
    };
    BigInt::from_slice(sign, &digits)
}

/// Correctly rounded conversion to an MPFR float.
pub fn rational_to_float(q: &Rational, prec: u32) -> Float {
    let r = rug::Rational::from((bigint_to_rug(q.numer()), bigint_to_rug(q.denom())));
    Float::with_val(prec, &r)
}

/// Exact conversion of a finite float (a dyadic rational).
pub fn float_to_rational(x: &Float) -> Option<Rational> {
    let r = x.to_rational()?;
    let (n, d) = r.into_numer_denom();
    Some(Rational::new(rug_to_bigint(&n), rug_to_bigint(&d)))
}

/// Greatest common divisor of two rationals viewed as integers; `None`
/// unless both are integral.
pub fn integer_gcd(a: &Rational, b: &Rational) -> Option<BigInt> {
    if !is_integer(a) || !is_integer(b) {
        return None;
    }
    Some(a.numer().abs().gcd(&b.numer().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-25/6").unwrap(), rat(-25, 6));
        assert_eq!(parse_rational(" 12 ").unwrap(), int(12));
        assert_eq!(parse_rational("+4/8").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("6/-4"), Err(ParseRationalError("6/-4".into())));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn lowest_terms() {
        let q = parse_rational("10/-4".replace('-', "").as_str()).unwrap();
        assert_eq!(q.numer(), &BigInt::from(5));
        assert_eq!(q.denom(), &BigInt::from(2));
        let neg = rat(6, -4);
        assert!(neg.denom().is_positive());
        assert_eq!(format_rational(&neg), "-3/2");
        assert_eq!(format_rational(&int(-7)), "-7");
    }

    #[test]
    fn rug_round_trip() {
        let big: BigInt = "-123456789012345678901234567890".parse().unwrap();
        assert_eq!(rug_to_bigint(&bigint_to_rug(&big)), big);
        assert_eq!(rug_to_bigint(&bigint_to_rug(&BigInt::zero())), BigInt::zero());
        let f = rational_to_float(&rat(3, 8), 64);
        assert_eq!(float_to_rational(&f).unwrap(), rat(3, 8));
    }
}
