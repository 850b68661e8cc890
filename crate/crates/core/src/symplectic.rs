//! Rank-4 symplectic lattices, MUM nilpotents and their normal forms.
//!
//! Coordinates are always ordered `(c₃, c₂, c₁, c₀)` with respect to a basis
//! `e₃, e₂, e₁, e₀`, and the symplectic form has `⟨e₃,e₀⟩ = ⟨e₂,e₁⟩ = 1`.
//! With this ordering a MUM logarithm in normal form is strictly lower
//! triangular:
//!
//! ```text
//!     ⎡0 0  0 0⎤
//! N = ⎢a 0  0 0⎥
//!     ⎢e b  0 0⎥
//!     ⎣f e −a 0⎦
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::matrix::{Mat4, Vec4};
use crate::rational::{format_rational, int, is_integer, rat, Rational};
use crate::scalar::Scalar;
use crate::RationalMatrix;



#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymplecticError {
    #[error("weight filtration implemented only for MUM type")]
    NotMum,
    #[error("zero nilpotent generates no boundary type")]
    ZeroNilpotent,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not infinitesimally symplectic")]
    NotInfinitesimallySymplectic,
    #[error("matrix is not unipotent: (T - I)^4 != 0")]
    NotUnipotent,
    #[error("matrix is not integral")]
    NotIntegral,
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("not a polarizable nilpotent orbit")]
    NotPolarizable,
    #[error("normal form violates integrality: {0}")]
    NonIntegralNormalForm(String),
    #[error("unexpected lattice structure: {0}")]
    Lattice(String),
}

/// Gram matrix of the fixed symplectic form in `(e₃,e₂,e₁,e₀)` order.
pub fn gram() -> RationalMatrix {
    Mat4::from_fn(|i, j| match (i, j) {
        (0, 3) | (1, 2) => int(1),
        (3, 0) | (2, 1) => int(-1),
        _ => int(0),
    })
}

/// `⟨x, y⟩ = xᵀ G y`.
pub fn pairing<T: Scalar>(x: &Vec4<T>, y: &Vec4<T>) -> T {
    // G has only four nonzero entries.
    x[0].clone() * y[3].clone() + x[1].clone() * y[2].clone() - x[2].clone() * y[1].clone() - x[3].clone() * y[0].clone()
}

pub fn is_symplectic(t: &RationalMatrix) -> bool {
    let g = gram();
    &(&t.transpose() * &g) * t == g
}

pub fn is_infinitesimally_symplectic(n: &RationalMatrix) -> bool {
    let g = gram();
    (&(&n.transpose() * &g) + &(&g * n)).is_exact_zero()
}

pub fn is_integral(t: &RationalMatrix) -> bool {
    t.rows().iter().flatten().all(is_integer)
}

/// Boundary types of a one-parameter degeneration of a rank-4 VHS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NilpotentType {
    TypeI,
    TypeII,
    Mum,
}

impl fmt::Display for NilpotentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NilpotentType::TypeI => "type-I",
            NilpotentType::TypeII => "type-II",
            NilpotentType::Mum => "MUM",
        })
    }
}

pub fn classify_nilpotent(n: &RationalMatrix) -> Result<NilpotentType, SymplecticError> {
    if n.is_exact_zero() {
        return Err(SymplecticError::ZeroNilpotent);
    }
    if !n.pow(4).is_exact_zero() {
        return Err(SymplecticError::NotNilpotent);
    }
    if !is_infinitesimally_symplectic(n) {
        return Err(SymplecticError::NotInfinitesimallySymplectic);
    }
    let n2 = n * n;
    if !(&n2 * n).is_exact_zero() {
        return Ok(NilpotentType::Mum);
    }
    if n2.is_exact_zero() {
        return match n.rank(0.0) {
            1 => Ok(NilpotentType::TypeI),
            2 => Ok(NilpotentType::TypeII),
            _ => Err(SymplecticError::NotInfinitesimallySymplectic),
        };
    }
    // Jordan type (3,1) does not occur in sp(4).
    Err(SymplecticError::NotInfinitesimallySymplectic)
}

/// Monodromy weight filtration `W₀ ⊂ W₂ ⊂ W₄ ⊂ W₆` of a MUM nilpotent,
/// each step given by a rational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFiltration {
    pub w0: Vec<Vec4<Rational>>,
    pub w2: Vec<Vec4<Rational>>,
    pub w4: Vec<Vec4<Rational>>,
    pub w6: Vec<Vec4<Rational>>,
}

impl WeightFiltration {
    pub fn steps(&self) -> [&Vec<Vec4<Rational>>; 4] {
        [&self.w0, &self.w2, &self.w4, &self.w6]
    }
}

/// A cyclic vector `x` for a MUM nilpotent, i.e. `N³x ≠ 0`.
fn cyclic_vector(n3: &RationalMatrix) -> Option<Vec4<Rational>> {
    (0..4).find_map(|j| {
        let col = n3.column(j);
        if col.iter().all(Zero::is_zero) {
            None
        } else {
            Some(std::array::from_fn(|i| if i == j { int(1) } else { int(0) }))
        }
    })
}

fn reduced_span(vectors: &[Vec4<Rational>]) -> Vec<Vec4<Rational>> {
    // Row-reduce the vectors; the nonzero rows are a canonical basis.
    let mut rows: Vec<Vec4<Rational>> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..4 {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for k in 0..4 {
            rows[rank][k] = &rows[rank][k] * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for k in 0..4 {
                    let delta = &factor * &rows[rank][k];
                    rows[r][k] = &rows[r][k] - &delta;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

pub fn weight_filtration(n: &RationalMatrix) -> Result<WeightFiltration, SymplecticError> {
    if classify_nilpotent(n)? != NilpotentType::Mum {
        return Err(SymplecticError::NotMum);
    }
    let n2 = n * n;
    let n3 = &n2 * n;
    let x = cyclic_vector(&n3).ok_or(SymplecticError::NotMum)?;
    let chain = [n3.apply(&x), n2.apply(&x), n.apply(&x), x];
    Ok(WeightFiltration {
        w0: reduced_span(&chain[..1]),
        w2: reduced_span(&chain[..2]),
        w4: reduced_span(&chain[..3]),
        w6: reduced_span(&chain[..4]),
    })
}

/// Exact logarithm of a unipotent matrix with `(T − I)⁴ = 0`.
pub fn log_unipotent(t: &RationalMatrix) -> Result<RationalMatrix, SymplecticError> {
    let u = t - &Mat4::identity(&int(0));
    if !u.pow(4).is_exact_zero() {
        return Err(SymplecticError::NotUnipotent);
    }
    Ok(t.log_unipotent())
}

/// The quadruple `(a, b, e, f)` presenting a MUM nilpotent in an adapted
/// symplectic basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NormalForm {
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub e: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub f: Rational,
}

pub(crate) fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

impl NormalForm {
    pub fn new(a: Rational, b: Rational, e: Rational, f: Rational) -> Self {
        NormalForm { a, b, e, f }
    }

    pub fn from_ints(a: i64, b: i64, e: (i64, i64), f: (i64, i64)) -> Self {
        NormalForm::new(int(a), int(b), rat(e.0, e.1), rat(f.0, f.1))
    }

    pub fn nilpotent(&self) -> RationalMatrix {
        let z = int(0);
        Mat4::from_rows([
            [z.clone(), z.clone(), z.clone(), z.clone()],
            [self.a.clone(), z.clone(), z.clone(), z.clone()],
            [self.e.clone(), self.b.clone(), z.clone(), z.clone()],
            [self.f.clone(), self.e.clone(), -self.a.clone(), z],
        ])
    }

    /// `T = exp(N)`.
    pub fn monodromy(&self) -> RationalMatrix {
        self.nilpotent().exp_nilpotent()
    }

    /// Reads the quadruple off a strictly lower-triangular infinitesimally
    /// symplectic matrix.
    pub fn from_nilpotent(n: &RationalMatrix) -> Option<Self> {
        let nf = NormalForm::new(n.get(1, 0).clone(), n.get(2, 1).clone(), n.get(2, 0).clone(), n.get(3, 0).clone());
        (nf.nilpotent() == *n).then_some(nf)
    }

    /// Effect of the basis change `e₃ ↦ −e₃, e₀ ↦ −e₀`: `(a, e) ↦ (−a, −e)`.
    pub fn sign_flipped(&self) -> Self {
        NormalForm::new(-self.a.clone(), self.b.clone(), -self.e.clone(), self.f.clone())
    }

    /// `f/(2a)`, the rational extension class.
    pub fn f_over_2a(&self) -> Rational {
        &self.f / (&self.a * int(2))
    }

    /// `e/a`.
    pub fn e_over_a(&self) -> Rational {
        &self.e / &self.a
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(a, b, e, f) = ({}, {}, {}, {})",
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.e),
            format_rational(&self.f)
        )
    }
}

/// `A = exp(M)` for the unipotent part of the weight stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightStabilizerElement {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

impl WeightStabilizerElement {
    pub fn new(p: Rational, q: Rational, r: Rational, s: Rational) -> Self {
        WeightStabilizerElement { p, q, r, s }
    }

    pub fn identity() -> Self {
        WeightStabilizerElement::new(int(0), int(0), int(0), int(0))
    }

    pub fn log_matrix(&self) -> RationalMatrix {
        NormalForm::new(self.p.clone(), self.q.clone(), self.r.clone(), self.s.clone()).nilpotent()
    }

    pub fn matrix(&self) -> RationalMatrix {
        self.log_matrix().exp_nilpotent()
    }

    /// Recovers `(p, q, r, s)` from a unipotent lower-triangular symplectic matrix.
    pub fn from_matrix(a: &RationalMatrix) -> Option<Self> {
        let m = log_unipotent(a).ok()?;
        let nf = NormalForm::from_nilpotent(&m)?;
        Some(WeightStabilizerElement::new(nf.a, nf.b, nf.e, nf.f))
    }

    /// `exp(M)` is integral: `p, q, r ± pq/2, s − p²q/6 ∈ ℤ`.
    pub fn is_integral(&self) -> bool {
        is_integral(&self.matrix())
    }

    /// Group product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&(&self.matrix() * &other.matrix())).expect("weight stabilizer is closed under products")
    }
}

/// `N ↦ Ad(exp M) N` in coordinates:
/// `e ↦ e − bp + aq`, `f ↦ f − 2ep + bp² − apq + 2ar`; `a`, `b` fixed.
pub fn act_weight_stabilizer(g: &WeightStabilizerElement, nf: &NormalForm) -> NormalForm {
    let WeightStabilizerElement { p, q, r, .. } = g;
    let NormalForm { a, b, e, f } = nf;
    let e_new = e - b * p + a * q;
    let f_new = f - int(2) * e * p + b * p * p - a * p * q + int(2) * a * r;
    NormalForm::new(a.clone(), b.clone(), e_new, f_new)
}

/// Residue class `value mod modulus` with `0 ≤ value < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueClass {
    #[serde(serialize_with = "ser_bigint")]
    pub value: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub modulus: BigInt,
    /// True when the class is that of `2e` (the `ab` odd case).
    pub doubled: bool,
}

fn ser_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = if self.doubled { "2e" } else { "e" };
        write!(f, "[{what}] = [{}] in Z/{}Z", self.value, self.modulus)
    }
}

/// Complete invariants of a normal form under the weight stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GgkInvariants {
    #[serde(serialize_with = "ser_bigint")]
    pub b: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub abs_a: BigInt,
    pub e_class: ResidueClass,
}

impl fmt::Display for GgkInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b = {}, |a| = {}, {}", self.b, self.abs_a, self.e_class)
    }
}

/// `b`, `|a|` and the class of `e` (or `2e`) modulo `gcd(a, b)` (or twice
/// it). The class is taken in the `a > 0` gauge so that it is also stable
/// under the sign flips in the stabilizer.
pub fn invariants(nf: &NormalForm) -> Result<GgkInvariants, SymplecticError> {
    let report = check_integrality_polarization(nf);
    if let Some(bad) = report.first_failure() {
        return Err(if bad.starts_with("polarization") {
            SymplecticError::NotPolarizable
        } else {
            SymplecticError::NonIntegralNormalForm(bad.to_string())
        });
    }
    let a = nf.a.numer().clone();
    let b = nf.b.numer().clone();
    let m = a.abs().gcd(&b);
    let e = if a.is_negative() { -nf.e.clone() } else { nf.e.clone() };
    let ab_even = (&a * &b).is_even();
    let (value, modulus) = if ab_even {
        (e.numer().clone(), m.clone())
    } else {
        let two_e = &e * int(2);
        (two_e.numer().clone(), &m * 2)
    };
    Ok(GgkInvariants {
        b,
        abs_a: a.abs(),
        e_class: ResidueClass {
            value: value.mod_floor(&modulus),
            modulus,
            doubled: !ab_even,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrityReport {
    pub checks: Vec<ConditionCheck>,
}

impl IntegrityReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.checks.iter().find(|c| !c.holds).map(|c| c.condition.as_str())
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.condition.as_str()).collect()
    }
}

/// Checks `a, b, e ± ab/2, f − a²b/6 ∈ ℤ` and the polarization
/// inequalities `a²b > 0`, `b > 0`.
pub fn check_integrality_polarization(nf: &NormalForm) -> IntegrityReport {
    let NormalForm { a, b, e, f } = nf;
    let half_ab = a * b / int(2);
    let zero = int(0);
    let items = [
        ("a in Z", is_integer(a)),
        ("b in Z", is_integer(b)),
        ("e + ab/2 in Z", is_integer(&(e + &half_ab))),
        ("e - ab/2 in Z", is_integer(&(e - &half_ab))),
        ("f - a^2 b/6 in Z", is_integer(&(f - a * a * b / int(6)))),
        ("polarization a^2 b > 0", a * a * b > zero),
        ("polarization b > 0", *b > zero),
    ];
    IntegrityReport {
        checks: items
            .into_iter()
            .map(|(c, holds)| ConditionCheck { condition: c.to_string(), holds })
            .collect(),
    }
}

/// Column-style Hermite reduction: a unimodular `U` with `M·U` upper
/// triangular.
fn upper_triangularizing_unimodular(m: &[[BigInt; 4]; 4]) -> Option<[[BigInt; 4]; 4]> {
    let mut a = m.clone();
    let mut u: [[BigInt; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
    for row in (0..4).rev() {
        for col in 0..row {
            if a[row][col].is_zero() {
                continue;
            }
            let x_ = a[row][row].clone();
            let y_ = a[row][col].clone();
            let eg = x_.extended_gcd(&y_);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (cx, cy) = (&x_ / &g, &y_ / &g);
            for mat in [&mut a, &mut u] {
                for r in 0..4 {
                    let vi = mat[r][row].clone();
                    let vj = mat[r][col].clone();
                    mat[r][row] = &s * &vi + &t * &vj;
                    mat[r][col] = -&cy * &vi + &cx * &vj;
                }
            }
        }
        if a[row][row].is_zero() {
            return None;
        }
    }
    Some(u)
}

/// Integral symplectic change of basis adapted to `W(N)` and the resulting
/// normal form.
///
/// The returned `A` has as columns the new basis vectors `e₃', e₂', e₁', e₀'`
/// in the old coordinates, `A ∈ Sp(4, ℤ)`, and `A⁻¹ N A` is in normal form.
pub fn normal_form(t: &RationalMatrix) -> Result<(NormalForm, RationalMatrix), SymplecticError> {
    if !is_integral(t) {
        return Err(SymplecticError::NotIntegral);
    }
    if !is_symplectic(t) {
        return Err(SymplecticError::NotSymplectic);
    }
    let n = log_unipotent(t)?;
    if classify_nilpotent(&n)? != NilpotentType::Mum {
        return Err(SymplecticError::NotMum);
    }
    let adapted = if NormalForm::from_nilpotent(&n).is_some() {
        Mat4::identity(&int(0))
    } else {
        adapted_basis(&n)?
    };
    let inv = adapted.inverse().ok_or_else(|| SymplecticError::Lattice("singular adapted basis".into()))?;
    let n_adapted = &(&inv * &n) * &adapted;
    let nf = NormalForm::from_nilpotent(&n_adapted)
        .ok_or_else(|| SymplecticError::Lattice("adapted basis does not triangularize N".into()))?;
    if nf.b <= int(0) || &nf.a * &nf.a * &nf.b <= int(0) {
        return Err(SymplecticError::NotPolarizable);
    }
    Ok((nf, adapted))
}

fn adapted_basis(n: &RationalMatrix) -> Result<RationalMatrix, SymplecticError> {
    let n2 = n * n;
    let n3 = &n2 * n;
    let x = cyclic_vector(&n3).ok_or(SymplecticError::NotMum)?;
    // Flag basis v₀ ∈ W₀, v₁ ∈ W₂, v₂ ∈ W₄, v₃.
    let v = Mat4::from_columns([n3.apply(&x), n2.apply(&x), n.apply(&x), x]);
    let v_inv = v.inverse().ok_or(SymplecticError::NotMum)?;
    let denom = v_inv
        .rows()
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: [[BigInt; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| (v_inv.get(i, j) * Rational::from_integer(denom.clone())).to_integer()));
    let u = upper_triangularizing_unimodular(&scaled).ok_or_else(|| SymplecticError::Lattice("degenerate flag".into()))?;
    let g: [Vec4<Rational>; 4] = std::array::from_fn(|j| std::array::from_fn(|i| Rational::from_integer(u[i][j].clone())));

    let f0 = g[0].clone();
    let f1 = g[1].clone();
    let unit = |x: Rational, what: &str| -> Result<Rational, SymplecticError> {
        if x.abs() == int(1) {
            Ok(x)
        } else {
            Err(SymplecticError::Lattice(format!("{what} pairing is {}, expected ±1", format_rational(&x))))
        }
    };
    let s30 = unit(pairing(&g[3], &f0), "<e3,e0>")?;
    let s21 = unit(pairing(&g[2], &f1), "<e2,e1>")?;
    let f2: Vec4<Rational> = std::array::from_fn(|i| &g[2][i] * &s21);
    let mut f3: Vec4<Rational> = std::array::from_fn(|i| &g[3][i] * &s30);
    let x = -pairing(&f3, &f1);
    f3 = std::array::from_fn(|i| &f3[i] + &x * &f2[i]);
    let y = pairing(&f3, &f2);
    f3 = std::array::from_fn(|i| &f3[i] + &y * &f1[i]);

    let a = Mat4::from_columns([f3, f2, f1, f0]);
    if !is_symplectic(&a) {
        return Err(SymplecticError::Lattice("weight filtration is not isotropic".into()));
    }
    Ok(a)
}
