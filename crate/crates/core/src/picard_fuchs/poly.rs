//! Dense univariate polynomials and root isolation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bigcomplex::BigComplex;
use crate::rational::{int, Rational};
use crate::recognize::convergents;
use crate::scalar::{ComplexField, Field, Scalar};

/// Coefficients in ascending degree; trailing exact zeros are stripped, so
/// the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_exact_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut it = self.coeffs.iter().rev();
        let Some(first) = it.next() else {
            return x.zero_like();
        };
        it.fold(first.clone(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * c.from_i64_like(i as i64))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly { coeffs: Vec::new() };
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// `p(x + c)`.
    pub fn taylor_shift(&self, c: &T) -> Self {
        let mut out: Vec<T> = Vec::new();
        for a in self.coeffs.iter().rev() {
            // out ← out·(x + c) + a
            let mut next = vec![a.zero_like(); out.len() + 1];
            for (i, o) in out.iter().enumerate() {
                next[i + 1] = next[i + 1].clone() + o.clone();
                next[i] = next[i].clone() + o.clone() * c.clone();
            }
            next[0] = next[0].clone() + a.clone();
            out = next;
        }
        Poly::new(out)
    }

    /// `p(−x)`.
    pub fn reflect(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }
}

impl<T: Field> Poly<T> {
    /// Quotient and remainder; `None` for a zero divisor.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.leading()?.clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((Poly { coeffs: Vec::new() }, self.clone()));
        }
        let mut q = vec![dl.zero_like(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / dl.clone();
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - c.clone() * dj.clone();
            }
            q[k] = c;
        }
        r.truncate(dd);
        Some((Poly::new(q), Poly::new(r)))
    }
}

impl Poly<Rational> {
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let l = l.clone();
                self.map(|c| c / &l)
            }
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_complex64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)).collect()
    }

    /// Rational roots with multiplicities, and the remaining cofactor free
    /// of rational roots.
    pub fn rational_roots(&self) -> (Vec<(Rational, usize)>, Poly<Rational>) {
        let mut rest = self.clone();
        let mut found: Vec<(Rational, usize)> = Vec::new();
        'outer: loop {
            let Some(deg) = rest.degree() else { break };
            if deg == 0 {
                break;
            }
            if rest.coeffs[0].is_zero() {
                push_root(&mut found, int(0));
                rest = Poly::new(rest.coeffs[1..].to_vec());
                continue;
            }
            // Any rational root p/q has q dividing the leading numerator
            // after clearing denominators.
            let cleared = rest.clear_denominators();
            let bound = cleared.last().expect("nonzero").abs();
            for z in aberth(&rest.to_complex64()) {
                if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                    continue;
                }
                let Some(approx) = Rational::from_float(z.re) else { continue };
                for cand in convergents(&approx).take_while(|c| c.denom() <= &bound) {
                    if rest.eval(&cand).is_zero() {
                        let lin = Poly::new(vec![-cand.clone(), int(1)]);
                        rest = rest.div_rem(&lin).expect("nonzero").0;
                        push_root(&mut found, cand);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        (found, rest)
    }

    /// Integer coefficients proportional to `self`.
    pub fn clear_denominators(&self) -> Vec<BigInt> {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::from(1), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        self.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
    }
}

fn push_root(found: &mut Vec<(Rational, usize)>, r: Rational) {
    match found.iter_mut().find(|(x, _)| *x == r) {
        Some((_, m)) => *m += 1,
        None => found.push((r, 1)),
    }
}

/// All complex roots of a polynomial with `f64` coefficients by the
/// Aberth–Ehrlich iteration.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Newton refinement of an approximate simple root at `prec` bits.
pub fn refine_root(p: &Poly<Rational>, guess: Complex64, prec: u32) -> BigComplex {
    let pc = p.map(|c| BigComplex::from_rational(prec + 32, c));
    let dpc = pc.derivative();
    let mut z = BigComplex::from_f64(prec + 32, guess.re, guess.im);
    let mut bits = 40u32;
    // Quadratic convergence doubles the correct bits each step.
    for _ in 0..64 {
        let step = pc.eval(&z) / dpc.eval(&z);
        z = &z - &step;
        bits = bits.saturating_mul(2);
        if step.is_zero() || (bits > prec + 64 && step.log2_magnitude() < -(f64::from(prec) + 16.0)) {
            break;
        }
    }
    z.with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(cs: &[i64]) -> Poly<Rational> {
        Poly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[-1, 1]).mul(&p(&[2, 1]))), p(&[-1, 1]));
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (2z − 1)²(z + 3)(z² + 1)
        let f = p(&[-1, 2]).mul(&p(&[-1, 2])).mul(&p(&[3, 1])).mul(&p(&[1, 0, 1]));
        let (roots, rest) = f.rational_roots();
        assert!(roots.contains(&(rat(1, 2), 2)));
        assert!(roots.contains(&(int(-3), 1)));
        assert_eq!(rest.monic(), p(&[1, 0, 1]));
    }

    #[test]
    fn shift_and_reflect() {
        let f = p(&[1, 2, 3]);
        assert_eq!(f.taylor_shift(&int(1)), p(&[6, 8, 3]));
        assert_eq!(f.reflect(), p(&[1, -2, 3]));
    }

    #[test]
    fn refine_golden_root() {
        let f = p(&[1, -123, 1]);
        let roots = aberth(&f.to_complex64());
        let small = roots.iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let r = refine_root(&f, *small, 256);
        assert!(f.map(|c| BigComplex::from_rational(256, c)).eval(&r).log2_magnitude() < -240.0);
    }
}
