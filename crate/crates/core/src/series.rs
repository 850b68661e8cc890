//! Truncated univariate power series `c₀ + c₁x + … + c_N x^N + O(x^{N+1})`.
//!
//! The truncation order is explicit and never grows silently: binary
//! operations truncate to the smaller order of their operands.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series exp requires zero constant term")]
    NonZeroConstant,
    #[error("series log requires unit constant term")]
    NonUnitConstant,
    #[error("series is not an invertible coordinate (needs c0 = 0, c1 != 0)")]
    NotInvertibleCoordinate,
    #[error("series has no multiplicative inverse (zero constant term)")]
    NotInvertible,
    #[error("composition requires inner series with zero constant term")]
    BadComposition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Series whose order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        TruncatedSeries { coeffs }
    }

    pub fn zero(template: &T, order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![template.zero_like(); order + 1],
        }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(&c, order);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate `x` itself.
    pub fn variable(template: &T, order: usize) -> Self {
        let mut s = Self::zero(template, order);
        if order >= 1 {
            s.coeffs[1] = template.one_like();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, value: T) {
        self.coeffs[i] = value;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Pads with zeros; only valid when the caller knows the tail vanishes
    /// (polynomials).
    pub fn extend_exact(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        let z = coeffs[0].zero_like();
        coeffs.resize(order.max(self.order()) + 1, z);
        TruncatedSeries { coeffs }
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact_zero)
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Multiplication by `x^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.coeffs[0], self.order());
        for i in 0..=self.order().saturating_sub(k) {
            if i + k <= self.order() {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Formal derivative; the order drops by one (stays 0 for constants).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(&self.coeffs[0], 0);
        }
        TruncatedSeries {
            coeffs: (1..=self.order())
                .map(|i| self.coeffs[i].clone() * self.coeffs[i].from_i64_like(i as i64))
                .collect(),
        }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.coeffs[0].one_like(), self.order());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `self(inner(x))`; needs `inner(0) = 0`. The result has the smaller
    /// of the two orders.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_exact_zero() {
            return Err(SeriesError::BadComposition);
        }
        Ok(self.compose_unchecked(inner))
    }

    /// Horner composition with an arbitrary inner series (the constant term
    /// of `inner` is used as is, so the result is only meaningful for
    /// polynomial `self` or jets).
    pub fn compose_unchecked(&self, inner: &Self) -> Self {
        let order = self.order().min(inner.order());
        let top = self.order();
        if !inner.coeffs[0].is_exact_zero() {
            let inner = inner.truncate(order);
            let mut acc = Self::constant(self.coeffs[top].clone(), order);
            for c in self.coeffs[..top].iter().rev() {
                acc = &acc * &inner;
                acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
            }
            return acc;
        }
        // With inner(0) = 0 the accumulator after folding in cⱼ is later
        // multiplied by innerʲ, so only its first `order − j` terms matter.
        let start = top.min(order);
        let mut acc = Self::constant(self.coeffs[start].clone(), order - start);
        for j in (0..start).rev() {
            acc = &acc.extend_exact(order - j) * &inner.truncate(order - j);
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[j].clone();
        }
        acc
    }
}

impl<T: Field> TruncatedSeries<T> {
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_exact_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = c0.recip();
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = c0.zero_like();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self * &other.inverse()?)
    }

    /// Antiderivative with zero constant term, keeping the order (the top
    /// coefficient of `self` is dropped).
    pub fn integral(&self) -> Self {
        let mut out = Self::zero(&self.coeffs[0], self.order());
        for i in 1..=self.order() {
            out.coeffs[i] = self.coeffs[i - 1].clone() / self.coeffs[0].from_i64_like(i as i64);
        }
        out
    }

    /// `exp(s)` for `s(0) = 0`, via the recurrence `n·e_n = Σ k·s_k·e_{n−k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_exact_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        let n = self.order();
        let one = self.coeffs[0].one_like();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(one.clone());
        for m in 1..=n {
            let mut acc = one.zero_like();
            for k in 1..=m {
                acc = acc + self.coeffs[k].clone() * one.from_i64_like(k as i64) * out[m - k].clone();
            }
            out.push(acc / one.from_i64_like(m as i64));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `log(s)` for `s(0) = 1`, as `∫ s'/s`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if !(c0.clone() - c0.one_like()).is_exact_zero() {
            return Err(SeriesError::NonUnitConstant);
        }
        let q = self.derivative().extend_exact(self.order());
        let ratio = &q * &self.inverse()?;
        Ok(ratio.integral())
    }

    /// Compositional inverse `t` with `self(t(q)) = q + O(q^{N+1})`, by
    /// Newton iteration with doubling order.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        let n = self.order();
        if n < 1 || !self.coeffs[0].is_exact_zero() || self.coeffs[1].is_exact_zero() {
            return Err(SeriesError::NotInvertibleCoordinate);
        }
        let zero = self.coeffs[0].zero_like();
        let inv1 = self.coeffs[1].recip();
        let mut t = TruncatedSeries::variable(&zero, 1).scale(&inv1);
        let mut m = 1usize;
        while m < n {
            m = (2 * m).min(n);
            let t_m = t.extend_exact(m);
            let s_m = self.truncate(m);
            let q = TruncatedSeries::variable(&zero, m);
            let residual = &s_m.compose_unchecked(&t_m) - &q;
            let slope = s_m.derivative().extend_exact(m).compose_unchecked(&t_m);
            t = &t_m - &(&residual * &slope.inverse()?);
        }
        Ok(t.extend_exact(n))
    }
}

impl<'a, T: Scalar> Add<&'a TruncatedSeries<T>> for &'a TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()).collect(),
        }
    }
}

impl<'a, T: Scalar> Sub<&'a TruncatedSeries<T>> for &'a TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()).collect(),
        }
    }
}

impl<'a, T: Scalar> Mul<&'a TruncatedSeries<T>> for &'a TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = self.coeffs[0].clone() * rhs.coeffs[k].clone();
                for i in 1..=k {
                    if self.coeffs[i].is_exact_zero() || rhs.coeffs[k - i].is_exact_zero() {
                        continue;
                    }
                    acc = acc + self.coeffs[i].clone() * rhs.coeffs[k - i].clone();
                }
                acc
            })
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl<'a, T: Scalar> Neg for &'a TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}
