//! Fourth-order operators `L = Σⱼ zʲ Qⱼ(Θ)` with `Θ = z d/dz`, their
//! singular points and local exponents, and the Frobenius basis at a MUM
//! point.

mod frobenius;
pub mod poly;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::bigcomplex::BigComplex;
use crate::rational::{format_rational, int, Rational};
use crate::recognize::rational_reconstruct;
use crate::scalar::{ComplexField, Scalar};
use crate::series::SeriesError;
use crate::symplectic::ser_rational;

pub use frobenius::{
    apply_log_graded, frobenius_basis, local_monodromy_mum, local_monodromy_mum_log, mirror_map, FrobeniusBasis, MirrorMap,
};
pub use poly::Poly;
use poly::{aberth, refine_root};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PfError {
    #[error("operator has no terms")]
    Empty,
    #[error("leading coefficient of Θ^4 vanishes identically")]
    ZeroLeading,
    #[error("ordinary point has trivial indicial data")]
    OrdinaryPoint,
    #[error("point is not maximally unipotent: {0}")]
    NotMum(String),
    #[error("irregular singular point: {0}")]
    Irregular(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Fourth-order operator in `Θ`-form.
#[derive(Debug, Clone, PartialEq)]
pub struct PFOperator {
    /// `terms[j][i]` is the coefficient of `zʲ Θⁱ`.
    terms: Vec<[Rational; 5]>,
}

/// Stirling numbers of the second kind `S(i, k)` for `i, k ≤ 4`.
const STIRLING2: [[i64; 5]; 5] = [
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 1, 1, 0, 0],
    [0, 1, 3, 1, 0],
    [0, 1, 7, 6, 1],
];

impl PFOperator {
    pub fn new(mut terms: Vec<[Rational; 5]>) -> Result<Self, PfError> {
        while terms.last().is_some_and(|t| t.iter().all(Zero::is_zero)) {
            terms.pop();
        }
        if terms.is_empty() {
            return Err(PfError::Empty);
        }
        let op = PFOperator { terms };
        if op.theta_coefficient(4).is_zero() {
            return Err(PfError::ZeroLeading);
        }
        Ok(op)
    }

    /// From the polynomials `Qⱼ(Θ)`, each of degree at most four.
    pub fn from_q_polys(q: &[Poly<Rational>]) -> Result<Self, PfError> {
        let terms = q
            .iter()
            .map(|p| {
                if p.degree().is_some_and(|d| d > 4) {
                    return Err(PfError::Irregular("Θ-degree above four".into()));
                }
                Ok(std::array::from_fn(|i| p.coeff(i).cloned().unwrap_or_else(|| int(0))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[[Rational; 5]] {
        &self.terms
    }

    /// Highest power `J` of `z`.
    pub fn z_degree(&self) -> usize {
        self.terms.len() - 1
    }

    /// `Qⱼ(Θ)`.
    pub fn q(&self, j: usize) -> Poly<Rational> {
        match self.terms.get(j) {
            Some(t) => Poly::new(t.to_vec()),
            None => Poly::new(Vec::new()),
        }
    }

    /// `Pᵢ(z)`, the coefficient of `Θⁱ`.
    pub fn theta_coefficient(&self, i: usize) -> Poly<Rational> {
        Poly::new(self.terms.iter().map(|t| t[i].clone()).collect())
    }

    /// `P₄(z)`.
    pub fn leading(&self) -> Poly<Rational> {
        self.theta_coefficient(4)
    }

    /// Coefficients `c_k(z)` of `L = Σ_k c_k(z) (d/dz)^k`, using
    /// `Θⁱ = Σ_k S(i,k) z^k (d/dz)^k`.
    pub fn d_form(&self) -> [Poly<Rational>; 5] {
        std::array::from_fn(|k| {
            let mut coeffs = vec![int(0); self.terms.len() + k];
            for i in k..5 {
                let s = STIRLING2[i][k];
                if s == 0 {
                    continue;
                }
                for (j, t) in self.terms.iter().enumerate() {
                    coeffs[j + k] += &t[i] * int(s);
                }
            }
            Poly::new(coeffs)
        })
    }

    /// The operator `w^J · L` in `w = 1/z`, where `Θ_z = −Θ_w`.
    pub fn at_infinity(&self) -> PFOperator {
        let j = self.z_degree();
        let terms = (0..=j)
            .map(|k| {
                let r = self.q(j - k).reflect();
                std::array::from_fn(|i| r.coeff(i).cloned().unwrap_or_else(|| int(0)))
            })
            .collect();
        PFOperator { terms }
    }

    /// `z^{−ρ} L z^{ρ}`, i.e. `Θ ↦ Θ + ρ`.
    pub fn exponent_shifted(&self, rho: &Rational) -> PFOperator {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let p = Poly::new(t.to_vec()).taylor_shift(rho);
                std::array::from_fn(|i| p.coeff(i).cloned().unwrap_or_else(|| int(0)))
            })
            .collect();
        PFOperator { terms }
    }

    /// Local operator at `z = ∞` in `w = 1/z`, shifted so that a MUM
    /// exponent `ρ₀` becomes `0`. Solutions near `∞` are `w^{ρ₀}` times
    /// solutions of the returned operator.
    pub fn localized_at_infinity(&self) -> Result<(PFOperator, Rational), PfError> {
        let data = indicial_polynomial(self, &SingularLocation::Infinity)?;
        let rho = data
            .mum_exponent
            .clone()
            .ok_or_else(|| PfError::NotMum(format!("indicial polynomial at infinity is {}", data.polynomial)))?;
        Ok((self.at_infinity().exponent_shifted(&rho), rho))
    }

    /// `Qⱼ(x)` evaluated in any scalar type.
    pub fn eval_q<T: Scalar>(&self, j: usize, x: &T) -> T {
        self.q(j).map(|c| x.from_rational_like(c)).eval(x)
    }
}

impl fmt::Display for PFOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, t) in self.terms.iter().enumerate() {
            if t.iter().all(Zero::is_zero) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let inner: Vec<String> = (0..5)
                .rev()
                .filter(|&i| !t[i].is_zero())
                .map(|i| match i {
                    0 => format_rational(&t[i]),
                    1 => format!("{}*T", format_rational(&t[i])),
                    _ => format!("{}*T^{i}", format_rational(&t[i])),
                })
                .collect();
            match j {
                0 => write!(f, "({})", inner.join(" + "))?,
                1 => write!(f, "z*({})", inner.join(" + "))?,
                _ => write!(f, "z^{j}*({})", inner.join(" + "))?,
            }
        }
        Ok(())
    }
}

/// Where a singular point sits on the Riemann sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularLocation {
    Rational(Rational),
    /// An irrational root of the leading coefficient, with its minimal
    /// factor over ℚ.
    Algebraic { approx: BigComplex, factor: Poly<Rational> },
    Infinity,
}

impl SingularLocation {
    pub fn zero() -> Self {
        SingularLocation::Rational(int(0))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, SingularLocation::Algebraic { .. })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SingularLocation::Infinity)
    }

    /// Numeric position; `None` at infinity.
    pub fn numeric(&self, prec: u32) -> Option<BigComplex> {
        match self {
            SingularLocation::Rational(q) => Some(BigComplex::from_rational(prec, q)),
            SingularLocation::Algebraic { approx, .. } => Some(approx.with_prec(prec)),
            SingularLocation::Infinity => None,
        }
    }

    pub fn approx_f64(&self) -> Option<(f64, f64)> {
        self.numeric(64).map(|z| (z.re_f64(), z.im_f64()))
    }
}

impl fmt::Display for SingularLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularLocation::Rational(q) => f.write_str(&format_rational(q)),
            SingularLocation::Algebraic { approx, .. } => f.write_str(&approx.to_string_digits(20)),
            SingularLocation::Infinity => f.write_str("infinity"),
        }
    }
}

impl Serialize for SingularLocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularPoint {
    pub location: SingularLocation,
    /// Multiplicity as a root of `P₄`; zero for `z = 0` and `∞` when they
    /// are not roots.
    pub multiplicity: usize,
    pub exact: bool,
}

/// `z = 0`, the roots of `P₄` and `z = ∞`, ordered by modulus then
/// argument.
///
/// `z = 0` and `z = ∞` are always listed: they are regular singular points
/// of every `Θ`-form operator unless the local exponents happen to be
/// those of an ordinary point.
pub fn singular_points(op: &PFOperator, prec: u32) -> Vec<SingularPoint> {
    let leading = op.leading();
    let (rational, rest) = leading.rational_roots();
    let zero_mult = rational.iter().find(|(r, _)| r.is_zero()).map_or(0, |(_, m)| *m);
    let mut finite: Vec<SingularPoint> = rational
        .into_iter()
        .filter(|(r, _)| !r.is_zero())
        .map(|(r, m)| SingularPoint { location: SingularLocation::Rational(r), multiplicity: m, exact: true })
        .collect();
    if rest.degree().is_some_and(|d| d > 0) {
        let square_free = rest.div_rem(&rest.gcd(&rest.derivative())).expect("nonzero gcd").0;
        for guess in aberth(&square_free.to_complex64()) {
            let approx = refine_root(&square_free, guess, prec);
            let multiplicity = root_multiplicity(&rest, &approx, prec);
            finite.push(SingularPoint {
                location: SingularLocation::Algebraic { approx, factor: square_free.monic() },
                multiplicity,
                exact: false,
            });
        }
    }
    finite.sort_by(|a, b| {
        let (ar, ai) = a.location.approx_f64().expect("finite");
        let (br, bi) = b.location.approx_f64().expect("finite");
        let (ma, mb) = (ar.hypot(ai), br.hypot(bi));
        ma.total_cmp(&mb).then(ai.atan2(ar).total_cmp(&bi.atan2(br))).then(Ordering::Equal)
    });
    let mut out = vec![SingularPoint { location: SingularLocation::zero(), multiplicity: zero_mult, exact: true }];
    out.extend(finite);
    out.push(SingularPoint { location: SingularLocation::Infinity, multiplicity: 0, exact: true });
    out
}

fn root_multiplicity(p: &Poly<Rational>, root: &BigComplex, prec: u32) -> usize {
    let threshold = -(f64::from(prec) / 2.0);
    let mut d = p.clone();
    let mut m = 0;
    loop {
        let v = d.map(|c| BigComplex::from_rational(prec, c)).eval(root);
        if d.is_zero() || v.log2_magnitude() > threshold {
            return m.max(1);
        }
        m += 1;
        d = d.derivative();
    }
}

/// Indicial polynomial, either exact or numeric.
#[derive(Debug, Clone, PartialEq)]
pub enum IndicialPolynomial {
    Exact(Poly<Rational>),
    Numeric(Poly<BigComplex>),
}

impl fmt::Display for IndicialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = match self {
            IndicialPolynomial::Exact(p) => p.coeffs().iter().map(format_rational).collect(),
            IndicialPolynomial::Numeric(p) => p.coeffs().iter().map(|c| c.to_string_digits(12)).collect(),
        };
        let parts: Vec<String> = terms
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| c.as_str() != "0")
            .map(|(i, c)| match i {
                0 => c.clone(),
                1 => format!("{c}*rho"),
                _ => format!("{c}*rho^{i}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for IndicialPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicialRoot {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicialData {
    pub polynomial: IndicialPolynomial,
    /// Rational local exponents with multiplicities; irrational exponents
    /// are not listed.
    pub roots: Vec<IndicialRoot>,
    pub is_mum: bool,
    #[serde(skip)]
    pub mum_exponent: Option<Rational>,
}

impl IndicialData {
    fn from_exact(p: Poly<Rational>) -> Self {
        let monic = p.monic();
        let (found, _) = monic.rational_roots();
        let mut roots: Vec<IndicialRoot> = found.into_iter().map(|(value, multiplicity)| IndicialRoot { value, multiplicity }).collect();
        roots.sort_by(|a, b| a.value.cmp(&b.value));
        let mum_exponent = (roots.len() == 1 && roots[0].multiplicity == 4).then(|| roots[0].value.clone());
        IndicialData { polynomial: IndicialPolynomial::Exact(p), roots, is_mum: mum_exponent.is_some(), mum_exponent }
    }
}

/// Falling factorial `ρ(ρ−1)⋯(ρ−k+1)` as a polynomial.
fn falling_factorial(k: usize) -> Poly<Rational> {
    (0..k).fold(Poly::new(vec![int(1)]), |acc, m| acc.mul(&Poly::new(vec![int(-(m as i64)), int(1)])))
}

/// Indicial polynomial of `op` at `point`.
pub fn indicial_polynomial(op: &PFOperator, point: &SingularLocation) -> Result<IndicialData, PfError> {
    match point {
        SingularLocation::Rational(c) if c.is_zero() => Ok(IndicialData::from_exact(op.q(0))),
        SingularLocation::Infinity => Ok(IndicialData::from_exact(op.q(op.z_degree()).reflect())),
        SingularLocation::Rational(c) => {
            if !op.leading().eval(c).is_zero() {
                return Err(PfError::OrdinaryPoint);
            }
            let shifted: Vec<Poly<Rational>> = op.d_form().iter().map(|p| p.taylor_shift(c)).collect();
            let m = shifted[4].coeffs().iter().position(|x| !x.is_zero()).expect("nonzero leading");
            let mut ind = Poly::new(Vec::new());
            for (k, ck) in shifted.iter().enumerate() {
                let needed = m as i64 - 4 + k as i64;
                for low in 0..needed.max(0) as usize {
                    if ck.coeff(low).is_some_and(|x| !x.is_zero()) {
                        return Err(PfError::Irregular(format!("at z = {}", format_rational(c))));
                    }
                }
                if needed >= 0 {
                    if let Some(x) = ck.coeff(needed as usize) {
                        ind = poly_add(&ind, &falling_factorial(k).map(|f| f * x));
                    }
                }
            }
            Ok(IndicialData::from_exact(ind))
        }
        SingularLocation::Algebraic { approx, .. } => numeric_indicial(op, approx),
    }
}

fn poly_add(a: &Poly<Rational>, b: &Poly<Rational>) -> Poly<Rational> {
    let n = a.coeffs().len().max(b.coeffs().len());
    Poly::new(
        (0..n)
            .map(|i| a.coeff(i).cloned().unwrap_or_else(|| int(0)) + b.coeff(i).cloned().unwrap_or_else(|| int(0)))
            .collect(),
    )
}

fn numeric_indicial(op: &PFOperator, at: &BigComplex) -> Result<IndicialData, PfError> {
    let prec = at.prec();
    let m = root_multiplicity(&op.leading(), at, prec);
    let shifted: Vec<Poly<BigComplex>> =
        op.d_form().iter().map(|p| p.map(|c| BigComplex::from_rational(prec, c)).taylor_shift(at)).collect();
    let zero = BigComplex::zero(prec);
    let mut coeffs = vec![zero.clone(); 5];
    for (k, ck) in shifted.iter().enumerate() {
        let needed = m as i64 - 4 + k as i64;
        if needed < 0 {
            continue;
        }
        if let Some(x) = ck.coeff(needed as usize) {
            let ff = falling_factorial(k);
            for (i, f) in ff.coeffs().iter().enumerate() {
                coeffs[i] = &coeffs[i] + &(x * &BigComplex::from_rational(prec, f));
            }
        }
    }
    let numeric = Poly::new(coeffs);
    let lead = numeric.leading().cloned().ok_or_else(|| PfError::Irregular("vanishing indicial polynomial".into()))?;
    // Normalized coefficients are rational for operators defined over ℚ.
    let bound = BigInt::from(1_000_000);
    let recognized: Option<Vec<Rational>> = numeric
        .coeffs()
        .iter()
        .map(|c| {
            let q = c / &lead;
            if q.im().clone().abs() > crate::recognize::recognition_tolerance(prec) {
                return None;
            }
            rational_reconstruct(q.re(), &bound)
        })
        .collect();
    Ok(match recognized {
        Some(cs) => IndicialData::from_exact(Poly::new(cs)),
        None => IndicialData { polynomial: IndicialPolynomial::Numeric(numeric), roots: Vec::new(), is_mum: false, mum_exponent: None },
    })
}

/// Report line for one singular point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularPointReport {
    pub point: SingularPoint,
    pub indicial: Option<IndicialData>,
}

pub fn analyze_singular_points(op: &PFOperator, prec: u32) -> Vec<SingularPointReport> {
    singular_points(op, prec)
        .into_iter()
        .map(|point| {
            let indicial = indicial_polynomial(op, &point.location).ok();
            SingularPointReport { point, indicial }
        })
        .collect()
}

/// Approximate distance from `z` to the nearest finite singular point
/// other than those listed in `exclude`.
pub fn nearest_singular_distance(points: &[SingularPoint], z: (f64, f64)) -> f64 {
    points
        .iter()
        .filter_map(|p| p.location.approx_f64())
        .map(|(x, y)| (x - z.0).hypot(y - z.1))
        .fold(f64::INFINITY, f64::min)
}
