//! Normalized limit Hodge filtrations at MUM points, the mirror dictionary
//! and the Torelli distinguishability test.
//!
//! A period matrix has columns `ω₃ ω₂ ω₁ ω₀` in the coordinates of a
//! symplectic basis adapted to a [`NormalForm`]:
//!
//! ```text
//! ⎡1   0                 0   0⎤
//! ⎢π₂  1                 0   0⎥
//! ⎢π₁  (b/a)π₂ + e/a     1   0⎥
//! ⎣π₀  (e/a)π₂ + f/a − π₁ −π₂ 1⎦
//! ```
//!
//! subject to `2aπ₁ = f + 2eπ₂ + bπ₂²`. Normalizing `π₂ = 0` leaves the
//! single complex parameter `π`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rug::Float;
use serde::Serialize;

use crate::bigcomplex::{kappa, kappa_im, BigComplex};
use crate::rational::{format_rational, int, is_integer, rat, rational_to_float, Rational};
use crate::recognize::{rational_reconstruct_within, recognition_tolerance};
use crate::scalar::Field;
use crate::symplectic::{check_integrality_polarization, NormalForm};
use crate::Mat4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LmhsError {
    #[error("input is not a period matrix of MUM shape: {0}")]
    NotPeriodMatrix(String),
    #[error("not in mirror gauge: {0}")]
    NotMirrorGauge(String),
    #[error("Euler characteristic not recognized: {0}")]
    Recognition(String),
}

/// Lower-unitriangular period matrix in an adapted symplectic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix<T> {
    matrix: Mat4<T>,
}

impl<T: Field> PeriodMatrix<T> {
    /// Builds the matrix from `(π₂, π₁, π₀)` without checking the bilinear
    /// relation.
    pub fn from_parameters(nf: &NormalForm, pi2: T, pi1: T, pi0: T) -> Self {
        let c = |q: &Rational| pi2.from_rational_like(q);
        let one = pi2.one_like();
        let zero = pi2.zero_like();
        let r2 = c(&(&nf.b / &nf.a)) * pi2.clone() + c(&nf.e_over_a());
        let r3 = c(&nf.e_over_a()) * pi2.clone() + c(&(&nf.f / &nf.a)) - pi1.clone();
        let matrix = Mat4::from_rows([
            [one.clone(), zero.clone(), zero.clone(), zero.clone()],
            [pi2.clone(), one.clone(), zero.clone(), zero.clone()],
            [pi1, r2, one.clone(), zero.clone()],
            [pi0, r3, -pi2, one],
        ]);
        PeriodMatrix { matrix }
    }

    /// The bilinear relation fixes `π₁` from `π₂`.
    pub fn consistent_pi1(nf: &NormalForm, pi2: &T) -> T {
        let c = |q: &Rational| pi2.from_rational_like(q);
        (c(&nf.f) + c(&(&nf.e * int(2))) * pi2.clone() + c(&nf.b) * pi2.clone() * pi2.clone()) / c(&(&nf.a * int(2)))
    }

    pub fn from_matrix(matrix: Mat4<T>) -> Self {
        PeriodMatrix { matrix }
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.matrix
    }

    pub fn pi2(&self) -> &T {
        self.matrix.get(1, 0)
    }

    pub fn pi1(&self) -> &T {
        self.matrix.get(2, 0)
    }

    pub fn pi0(&self) -> &T {
        self.matrix.get(3, 0)
    }

    /// Largest deviation from the required shape for `nf`, including the
    /// bilinear relation.
    pub fn shape_defect(&self, nf: &NormalForm) -> f64 {
        let expected = Self::from_parameters(nf, self.pi2().clone(), self.pi1().clone(), self.pi0().clone());
        let entries = (&self.matrix - &expected.matrix).max_abs();
        let bilinear = (self.pi1().clone() - Self::consistent_pi1(nf, self.pi2())).magnitude();
        entries.max(bilinear)
    }
}

/// Nilpotent in the Deligne splitting basis `v₃, …, v₀`.
pub fn deligne_nilpotent(nf: &NormalForm) -> Mat4<Rational> {
    NormalForm::new(nf.a.clone(), nf.b.clone(), int(0), int(0)).nilpotent()
}

/// A MUM point's normalized limit data.
#[derive(Debug, Clone, PartialEq)]
pub struct LmhsPoint<T = BigComplex> {
    pub normal_form: NormalForm,
    pub pi: T,
}

impl<T: Field> LmhsPoint<T> {
    pub fn new(normal_form: NormalForm, pi: T) -> Self {
        LmhsPoint { normal_form, pi }
    }

    pub fn f_over_2a(&self) -> Rational {
        self.normal_form.f_over_2a()
    }

    pub fn e_over_a(&self) -> Rational {
        self.normal_form.e_over_a()
    }

    /// The normalized period matrix with rows `[1,0,0,0]`, `[0,1,0,0]`,
    /// `[f/2a, e/a, 1, 0]`, `[π, f/2a, 0, 1]`.
    pub fn normalized_matrix(&self) -> Mat4<T> {
        let zero = self.pi.zero_like();
        let pm = PeriodMatrix::from_parameters(
            &self.normal_form,
            zero.clone(),
            zero.from_rational_like(&self.f_over_2a()),
            self.pi.clone(),
        );
        pm.matrix
    }
}

/// Kills `π₂` by `exp(−(π₂/a)N)` and reads off `π`.
pub fn normalize_lhf<T: Field>(pm: &PeriodMatrix<T>, nf: &NormalForm, tolerance: f64) -> Result<LmhsPoint<T>, LmhsError> {
    let report = check_integrality_polarization(nf);
    if nf.a.is_zero() || nf.b <= int(0) {
        return Err(LmhsError::NotPeriodMatrix(format!("normal form {nf} is not polarized ({:?})", report.failures())));
    }
    let defect = pm.shape_defect(nf);
    if !(defect <= tolerance) {
        return Err(LmhsError::NotPeriodMatrix(format!("shape defect {defect:e} exceeds {tolerance:e}")));
    }
    let pi2 = pm.pi2().clone();
    let t = -(pi2.clone() / pi2.from_rational_like(&nf.a));
    let n = nf.nilpotent().map(|q| pi2.from_rational_like(q));
    let shift = n.scale(&t).exp_nilpotent();
    let normalized = &shift * pm.matrix();
    Ok(LmhsPoint::new(nf.clone(), normalized.get(3, 0).clone()))
}

/// `F³_∞ = (1, 0, f/2a, π)`.
pub fn lhf_vector<T: Field>(point: &LmhsPoint<T>) -> [T; 4] {
    let z = point.pi.zero_like();
    [z.one_like(), z.clone(), z.from_rational_like(&point.f_over_2a()), point.pi.clone()]
}

/// Topological invariants of a mirror threefold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct MirrorInvariants {
    pub degree: i64,
    pub c2h: i64,
    pub chi: i64,
}

impl MirrorInvariants {
    pub fn new(degree: i64, c2h: i64, chi: i64) -> Self {
        MirrorInvariants { degree, c2h, chi }
    }

    /// `λ = 1` for even degree and `−1/2` for odd degree.
    pub fn twist(&self) -> Rational {
        if self.degree % 2 == 0 {
            int(1)
        } else {
            rat(-1, 2)
        }
    }

    pub fn normal_form(&self) -> NormalForm {
        NormalForm::new(int(1), int(self.degree), self.twist(), rat(-self.c2h, 12))
    }

    /// Dictionary frame from the Frobenius frame `(ω₃, ω₂, ω₁, ω₀)`: rows
    /// `(1,0,0,0)`, `(0,1,0,0)`, `(−c₂·H/24, λ, deg/2, 0)`,
    /// `(χκ, −c₂·H/24, 0, −deg/6)`.
    pub fn frame(&self, prec: u32) -> Mat4<BigComplex> {
        let c = |q: Rational| BigComplex::from_rational(prec, &q);
        let z = || BigComplex::zero(prec);
        let c2 = rat(-self.c2h, 24);
        Mat4::from_rows([
            [c(int(1)), z(), z(), z()],
            [z(), c(int(1)), z(), z()],
            [c(c2.clone()), c(self.twist()), c(rat(self.degree, 2)), z()],
            [kappa(prec).mul_i64(self.chi), c(c2), z(), c(rat(-self.degree, 6))],
        ])
    }
    /// [`Self::frame`] with `−χκ` in the constant entry of the last row.
    /// With `ω` normalized by `2πi·ω₂ = ψ₃ log z + ψ₂` this is the sign for
    /// which conifold monodromies are integral (the quintic family has a
    /// rank-one integral transvection only for this sign and `χ = −200`).
    pub fn integral_frame(&self, prec: u32) -> Mat4<BigComplex> {
        let mut m = self.frame(prec);
        let v = -m.get(3, 0).clone();
        m.set(3, 0, v);
        m
    }
}

impl fmt::Display for MirrorInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(deg, c2.H, chi) = ({}, {}, {})", self.degree, self.c2h, self.chi)
    }
}

/// `a = 1, b = deg, e = λ, f = −c₂·H/12, π = χκ`.
pub fn mirror_to_hodge(mi: &MirrorInvariants, prec: u32) -> LmhsPoint<BigComplex> {
    LmhsPoint::new(mi.normal_form(), kappa(prec).mul_i64(mi.chi))
}

pub fn hodge_to_mirror(point: &LmhsPoint<BigComplex>, denominator_bound: &BigInt) -> Result<MirrorInvariants, LmhsError> {
    let nf = &point.normal_form;
    if !is_integer(&nf.b) || nf.b <= int(0) {
        return Err(LmhsError::NotMirrorGauge(format!("b = {} is not a positive integer", format_rational(&nf.b))));
    }
    if nf.a != int(1) {
        return Err(LmhsError::NotMirrorGauge(format!("a = {} differs from 1", format_rational(&nf.a))));
    }
    let degree = i64::try_from(nf.b.to_integer()).map_err(|_| LmhsError::NotMirrorGauge("degree out of range".into()))?;
    let expected_e = MirrorInvariants::new(degree, 0, 0).twist();
    if nf.e != expected_e {
        return Err(LmhsError::NotMirrorGauge(format!(
            "e = {} but degree parity requires {}",
            format_rational(&nf.e),
            format_rational(&expected_e)
        )));
    }
    let c2 = -&nf.f * int(12);
    if !is_integer(&c2) {
        return Err(LmhsError::NotMirrorGauge(format!("-12 f = {} is not an integer", format_rational(&c2))));
    }
    let c2h = i64::try_from(c2.to_integer()).map_err(|_| LmhsError::NotMirrorGauge("c2.H out of range".into()))?;

    let prec = point.pi.prec();
    let tol = recognition_tolerance(prec);
    if point.pi.re().clone().abs() >= tol {
        return Err(LmhsError::Recognition(format!("Re(pi) = {:e} is not zero", point.pi.re().to_f64())));
    }
    let ratio = Float::with_val(prec, point.pi.im() / kappa_im(prec));
    let chi = rational_reconstruct_within(&ratio, denominator_bound, &tol)
        .filter(is_integer)
        .ok_or_else(|| LmhsError::Recognition(format!("pi/kappa = {} is not an integer", ratio.to_f64())))?;
    let chi = i64::try_from(chi.to_integer()).map_err(|_| LmhsError::Recognition("chi out of range".into()))?;
    Ok(MirrorInvariants::new(degree, c2h, chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorelliVerdict {
    Distinguishable,
    Inconclusive,
}

impl fmt::Display for TorelliVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorelliVerdict::Distinguishable => "distinguishable",
            TorelliVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Which test decided the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum TorelliBranch {
    /// `b₁ ≠ b₂`, an exact test.
    DegreesDiffer {
        #[serde(serialize_with = "crate::symplectic::ser_rational")]
        b1: Rational,
        #[serde(serialize_with = "crate::symplectic::ser_rational")]
        b2: Rational,
    },
    /// No rational with bounded denominator matches `π₁ − π₂`; evidence
    /// only at the working precision.
    PiDifferenceNotRational { difference: String, precision: u32, log2_tolerance: i64 },
    /// `π₁ − π₂` was recognized as a rational.
    PiDifferenceRational {
        #[serde(serialize_with = "crate::symplectic::ser_rational")]
        value: Rational,
        log2_residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorelliEvidence {
    pub verdict: TorelliVerdict,
    #[serde(flatten)]
    pub branch: TorelliBranch,
    pub summary: String,
}

impl TorelliEvidence {
    pub fn is_exact(&self) -> bool {
        matches!(self.branch, TorelliBranch::DegreesDiffer { .. })
    }
}

/// Distinguishes two MUM points if `b₁ ≠ b₂` or `π₁ − π₂ ∉ ℚ` (the latter
/// tested up to `denominator_bound` at `precision` bits).
pub fn torelli_distinguish(
    p1: &LmhsPoint<BigComplex>,
    p2: &LmhsPoint<BigComplex>,
    denominator_bound: &BigInt,
    precision: u32,
) -> TorelliEvidence {
    let (b1, b2) = (&p1.normal_form.b, &p2.normal_form.b);
    if b1 != b2 {
        return TorelliEvidence {
            verdict: TorelliVerdict::Distinguishable,
            summary: format!("b differs: {} vs {}", format_rational(b1), format_rational(b2)),
            branch: TorelliBranch::DegreesDiffer { b1: b1.clone(), b2: b2.clone() },
        };
    }
    let prec = precision.min(p1.pi.prec()).min(p2.pi.prec());
    let diff = &p1.pi.with_prec(prec) - &p2.pi.with_prec(prec);
    let tol = recognition_tolerance(prec);
    let log2_tolerance = -i64::from(prec / 2);
    let recognized = if diff.im().clone().abs() < tol {
        rational_reconstruct_within(diff.re(), denominator_bound, &tol)
    } else {
        None
    };
    match recognized {
        Some(value) => {
            let exact = BigComplex::from_real(rational_to_float(&value, prec));
            let residual = (&diff - &exact).abs();
            let log2_residual = if residual.is_zero() { f64::NEG_INFINITY } else { residual.log2().to_f64() };
            TorelliEvidence {
                verdict: TorelliVerdict::Inconclusive,
                summary: format!(
                    "equal b = {}; pi1 - pi2 recognized as the rational {}",
                    format_rational(b1),
                    format_rational(&value)
                ),
                branch: TorelliBranch::PiDifferenceRational { value, log2_residual },
            }
        }
        None => TorelliEvidence {
            verdict: TorelliVerdict::Distinguishable,
            summary: format!(
                "equal b = {}; pi1 - pi2 matches no rational with denominator <= {} at {prec} bits (distinguishable at working precision)",
                format_rational(b1),
                denominator_bound
            ),
            branch: TorelliBranch::PiDifferenceNotRational {
                difference: diff.to_string_digits(30),
                precision: prec,
                log2_tolerance,
            },
        },
    }
}

/// Convenience for exact evidence: a normal form with `a = 1` whose `b` is
/// positive.
pub fn is_mirror_gauge(nf: &NormalForm) -> bool {
    nf.a.is_one() && nf.b > int(0) && (nf.e == int(1) || nf.e == rat(-1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn quintic() -> NormalForm {
        NormalForm::from_ints(1, 5, (-1, 2), (-25, 6))
    }

    #[test]
    fn normalization_fixed_point() {
        let nf = quintic();
        let pi1 = PeriodMatrix::consistent_pi1(&nf, &int(0));
        assert_eq!(pi1, rat(-25, 12));
        let pm = PeriodMatrix::from_parameters(&nf, int(0), pi1, rat(3, 7));
        let point = normalize_lhf(&pm, &nf, 0.0).unwrap();
        assert_eq!(point.normalized_matrix(), *pm.matrix());
        assert_eq!(point.pi, rat(3, 7));
    }

    #[test]
    fn normalization_kills_pi2() {
        let nf = quintic();
        let pi2 = rat(2, 3);
        let pi1 = PeriodMatrix::consistent_pi1(&nf, &pi2);
        let pi0 = rat(-5, 11);
        let pm = PeriodMatrix::from_parameters(&nf, pi2.clone(), pi1.clone(), pi0.clone());
        let point = normalize_lhf(&pm, &nf, 0.0).unwrap();
        let t = NormalForm::nilpotent(&nf).scale(&(-&pi2 / &nf.a)).exp_nilpotent();
        assert_eq!(&t * pm.matrix(), point.normalized_matrix());
        assert_eq!(point.f_over_2a(), rat(-25, 12));
        let (a, b, e, f) = (&nf.a, &nf.b, &nf.e, &nf.f);
        let expected = (a * &pi0 + a * &pi1 * &pi2 - b * &pi2 * &pi2 * &pi2 / int(3) - e * &pi2 * &pi2 - f * &pi2) / a;
        assert_eq!(point.pi, expected);
    }

    #[test]
    fn non_period_matrix_rejected() {
        let nf = quintic();
        let pm = PeriodMatrix::from_parameters(&nf, int(1), int(0), int(0));
        assert!(matches!(normalize_lhf(&pm, &nf, 1e-30), Err(LmhsError::NotPeriodMatrix(_))));
    }

    #[test]
    fn deligne_basis_conjugation() {
        let nf = quintic();
        let pi2 = rat(1, 5);
        let pm = PeriodMatrix::from_parameters(&nf, pi2.clone(), PeriodMatrix::consistent_pi1(&nf, &pi2), rat(7, 3));
        let p = pm.matrix();
        let conj = &(&p.inverse().unwrap() * &nf.nilpotent()) * p;
        assert_eq!(conj, deligne_nilpotent(&nf));
    }

    #[test]
    fn quintic_dictionary() {
        let mi = MirrorInvariants::new(5, 50, -200);
        let point = mirror_to_hodge(&mi, 128);
        assert_eq!(point.normal_form, quintic());
        assert!(point.pi.re().is_zero());
        assert_eq!(hodge_to_mirror(&point, &BigInt::from(1_000_000)).unwrap(), mi);
        let v = lhf_vector(&point);
        assert_eq!(v[2], BigComplex::from_rational(128, &rat(-25, 12)));
    }

    #[test]
    fn even_degree_twist() {
        let point = mirror_to_hodge(&MirrorInvariants::new(42, 84, -98), 64);
        assert_eq!(point.normal_form.e, int(1));
        assert!(check_integrality_polarization(&point.normal_form).passes());
    }

    #[test]
    fn mirror_frame_conjugates_pascal() {
        let mi = MirrorInvariants::new(5, 50, -200);
        let prec = 128;
        let m = mi.frame(prec);
        let pascal = Mat4::from_fn(|i, j| {
            let binom = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]];
            BigComplex::from_rational(prec, &int(binom[i][j]))
        });
        let t = &(&m * &pascal) * &m.inverse().unwrap();
        let expected = [[1, 0, 0, 0], [1, 1, 0, 0], [2, 5, 1, 0], [-5, -3, -1, 1]];
        for i in 0..4 {
            for j in 0..4 {
                let d = t.get(i, j).clone() - BigComplex::from_rational(prec, &int(expected[i][j]));
                assert!(d.magnitude() < 1e-30, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn gauge_errors() {
        let mut point = mirror_to_hodge(&MirrorInvariants::new(5, 50, -200), 128);
        point.normal_form.b = int(-5);
        let err = hodge_to_mirror(&point, &BigInt::from(100)).unwrap_err();
        assert!(err.to_string().starts_with("not in mirror gauge"));
    }

    #[test]
    fn torelli_branches() {
        let bound = BigInt::from(1_000_000);
        let p42 = mirror_to_hodge(&MirrorInvariants::new(42, 84, -98), 128);
        let p14 = mirror_to_hodge(&MirrorInvariants::new(14, 56, -84), 128);
        let v = torelli_distinguish(&p42, &p14, &bound, 128);
        assert_eq!(v.verdict, TorelliVerdict::Distinguishable);
        assert!(v.is_exact());

        let same = torelli_distinguish(&p42, &p42, &bound, 128);
        assert_eq!(same.verdict, TorelliVerdict::Inconclusive);
        assert!(matches!(same.branch, TorelliBranch::PiDifferenceRational { ref value, .. } if value.is_zero()));

        let mut shifted = p42.clone();
        shifted.pi = &shifted.pi + &BigComplex::from_rational(128, &rat(1, 2));
        let half = torelli_distinguish(&shifted, &p42, &bound, 128);
        assert!(matches!(half.branch, TorelliBranch::PiDifferenceRational { ref value, .. } if *value == rat(1, 2)));
        let back = torelli_distinguish(&p42, &shifted, &bound, 128);
        assert!(matches!(back.branch, TorelliBranch::PiDifferenceRational { ref value, .. } if *value == rat(-1, 2)));

        let other = mirror_to_hodge(&MirrorInvariants::new(42, 84, -100), 128);
        let kappa_diff = torelli_distinguish(&p42, &other, &bound, 128);
        assert_eq!(kappa_diff.verdict, TorelliVerdict::Distinguishable);
        assert!(!kappa_diff.is_exact());
    }
}
