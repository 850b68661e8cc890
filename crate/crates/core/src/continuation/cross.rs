//! Integral frames at two MUM points and their limit data.
//!
//! The integral frame at `z = 0` is `Π = M ω` for the integral frame `M`
//! of [`MirrorInvariants`]. It is continued to the Frobenius frame at `z = ∞`
//! as `Π = K ω^∞`, and the monodromy there is `T₂ = K P K⁻¹` with `P` the
//! Pascal matrix.

use num_bigint::BigInt;
use serde::Serialize;

use crate::bigcomplex::BigComplex;
use crate::lmhs::{
    normalize_lhf, torelli_distinguish, LmhsPoint, MirrorInvariants, PeriodMatrix, TorelliEvidence,
};
use crate::matrix::Mat4;
use crate::picard_fuchs::{
    indicial_polynomial, local_monodromy_mum, singular_points, PFOperator, SingularLocation,
};
use crate::rational::{format_rational, int, is_integer, Rational};
use crate::scalar::Scalar;
use crate::symplectic::{invariants, is_integral, is_symplectic, normal_form, GgkInvariants, NormalForm};

use super::frames::LocalFrame;
use super::monodromy::{
    automatic_loops, log2_global_residual, choose_base_point, monodromy_representation, numeric_ode, recognize_matrix, recognize_vector,
    transport_with, LoopMonodromy,
};
use super::ode::GUARD_BITS;
use super::path::PathSpec;
use super::{ContinuationError, TransportMatrix};

/// Precision at which the adaptive loop starts.
pub const START_PRECISION: u32 = 128;
/// Default ceiling for adaptive precision.
pub const DEFAULT_MAX_PRECISION: u32 = 2048;

#[derive(Debug, Clone)]
pub struct CrossMumOptions {
    /// Initial precision in bits; doubled until results are stable.
    pub precision: u32,
    pub max_precision: u32,
    pub denominator_bound: BigInt,
    pub mirror_invariants: Option<MirrorInvariants>,
    pub base: Option<BigComplex>,
}

impl Default for CrossMumOptions {
    fn default() -> Self {
        CrossMumOptions {
            precision: START_PRECISION,
            max_precision: DEFAULT_MAX_PRECISION,
            denominator_bound: BigInt::from(1_000_000),
            mirror_invariants: None,
            base: None,
        }
    }
}

/// How the integral frame at the first MUM point was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrameSource {
    Supplied,
    /// Read off from the vanishing period of a conifold-type loop; the
    /// frame is conjectural and verified only by integrality.
    Recognized { conifold: String, conjectural: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MumPointReport {
    pub location: String,
    pub normal_form: NormalForm,
    pub invariants: GgkInvariants,
    /// `π` rendered to 30 significant digits.
    pub pi: String,
    /// `π/κ` rendered to 30 significant digits.
    pub pi_over_kappa: String,
    /// Integral monodromy around the point.
    pub monodromy: [[String; 4]; 4],
    /// `log₂` of the largest deviation of the period matrix from the
    /// required shape, floored at minus the working precision.
    pub log2_shape_defect: f64,
    #[serde(skip)]
    pub point: LmhsPoint<BigComplex>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopRecord {
    pub location: String,
    /// Integral monodromy in the frame of the first MUM point.
    pub matrix: [[String; 4]; 4],
}

fn render(m: &Mat4<Rational>) -> [[String; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| format_rational(m.get(i, j))))
}

fn to_complex(m: &Mat4<Rational>, prec: u32) -> Mat4<BigComplex> {
    m.map(|q| BigComplex::from_rational(prec, q))
}

/// Integral frame, loop monodromies and limit data at the MUM point
/// `z = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub precision: u32,
    pub base_point: String,
    pub frame_source: FrameSource,
    pub mirror_invariants: MirrorInvariants,
    pub mum: MumPointReport,
    pub loops: Vec<LoopRecord>,
    /// `log₂ ‖T₁ ⋯ Tₙ T_∞ − I‖` in the Frobenius frame.
    pub log2_global_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossMumReport {
    #[serde(flatten)]
    pub frame: FrameReport,
    /// Limit data at `z = ∞` in the continued integral frame.
    pub second: MumPointReport,
    /// Whether the loop around infinity reproduces the monodromy read off
    /// from the continued frame.
    pub infinity_loop_agrees: bool,
    pub torelli: TorelliEvidence,
}

impl CrossMumReport {
    pub fn points(&self) -> [&MumPointReport; 2] {
        [&self.frame.mum, &self.second]
    }
}

/// Runs `run` at doubling precision until two successive levels agree.
fn adaptive<R>(
    options: &CrossMumOptions,
    run: impl Fn(u32) -> Result<R, ContinuationError>,
    stable: impl Fn(&R, &R) -> bool,
) -> Result<R, ContinuationError> {
    let mut prec = options.precision.max(64);
    let mut previous: Option<R> = None;
    let mut last_error = None;
    while prec <= options.max_precision {
        match run(prec) {
            Ok(report) => {
                if let Some(prev) = &previous {
                    if stable(prev, &report) {
                        return Ok(report);
                    }
                }
                previous = Some(report);
            }
            Err(e @ (ContinuationError::PrecisionExhausted(_) | ContinuationError::Recognition(_))) => {
                previous = None;
                last_error = Some(e);
            }
            Err(e) => return Err(e),
        }
        prec *= 2;
    }
    Err(last_error.unwrap_or_else(|| {
        ContinuationError::PrecisionExhausted(format!("results not stable up to {} bits", options.max_precision))
    }))
}

fn check_mum_zero(op: &PFOperator) -> Result<(), ContinuationError> {
    let at_zero = indicial_polynomial(op, &SingularLocation::zero())?;
    if at_zero.mum_exponent != Some(int(0)) {
        return Err(ContinuationError::Frame("z = 0 is not a MUM point with exponent 0".into()));
    }
    Ok(())
}

/// Integral frame at the MUM point `z = 0`, from supplied invariants or by
/// recognition, with adaptive precision.
pub fn integral_frame(op: &PFOperator, options: &CrossMumOptions) -> Result<FrameReport, ContinuationError> {
    check_mum_zero(op)?;
    adaptive(options, |prec| frame_at(op, options, prec).map(|s| s.report), stable_frame)
}

/// Compares the limit data at `mum1 = 0` and `mum2 = ∞`, doubling the
/// precision from `options.precision` until two successive levels agree.
pub fn cross_mum_invariants(
    op: &PFOperator,
    mum1: &SingularLocation,
    mum2: &SingularLocation,
    options: &CrossMumOptions,
) -> Result<CrossMumReport, ContinuationError> {
    if *mum1 != SingularLocation::zero() || *mum2 != SingularLocation::Infinity {
        return Err(ContinuationError::Frame(format!(
            "MUM pair ({mum1}, {mum2}) unsupported; only (0, infinity) is implemented"
        )));
    }
    check_mum_zero(op)?;
    op.localized_at_infinity()?;
    adaptive(options, |prec| cross_mum_at(op, options, prec), |a, b| {
        stable_frame(&a.frame, &b.frame) && stable_point(&a.second, &b.second)
    })
}

fn stable_point(a: &MumPointReport, b: &MumPointReport) -> bool {
    let prec = a.point.pi.prec().min(b.point.pi.prec());
    let gap = (&a.point.pi.with_prec(prec) - &b.point.pi.with_prec(prec)).magnitude();
    a.normal_form == b.normal_form && a.monodromy == b.monodromy && gap < 2f64.powf(-(f64::from(prec) / 4.0))
}

fn stable_frame(a: &FrameReport, b: &FrameReport) -> bool {
    a.mirror_invariants == b.mirror_invariants
        && stable_point(&a.mum, &b.mum)
        && a.loops.iter().map(|l| &l.matrix).eq(b.loops.iter().map(|l| &l.matrix))
}

/// Frame data at fixed precision, with what the second point needs.
struct FrameState {
    report: FrameReport,
    base: BigComplex,
    exit: BigComplex,
    spoke_clearance: f64,
    max_modulus: f64,
    frame0: LocalFrame,
    integral: Vec<(SingularLocation, Mat4<Rational>)>,
}

fn frame_at(op: &PFOperator, options: &CrossMumOptions, prec: u32) -> Result<FrameState, ContinuationError> {
    let wp = prec + GUARD_BITS;
    let points = singular_points(op, wp);
    let base = match &options.base {
        Some(b) => b.with_prec(wp),
        None => choose_base_point(&points, wp),
    };
    let system = automatic_loops(&points, &base)?;
    let finite: Vec<(f64, f64)> = points.iter().filter_map(|p| p.location.approx_f64()).collect();
    let r0 = finite.iter().map(|&(x, y)| x.hypot(y)).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let max_modulus = finite.iter().map(|&(x, y)| x.hypot(y)).fold(0.0, f64::max);
    let frame0 = LocalFrame::mum_zero(op, &base, if r0.is_finite() { r0 } else { f64::MAX }, wp)?;

    let loops: Vec<_> = system.all().cloned().collect();
    let monodromy = monodromy_representation(op, &base, &loops, &frame0, prec)?;
    let residual = log2_global_residual(&monodromy);

    let bound = &options.denominator_bound;
    let (mi, source) = match &options.mirror_invariants {
        Some(mi) => (mi.clone(), FrameSource::Supplied),
        None => recognize_frame(&monodromy, bound, prec)?,
    };
    let integral = integral_loops(&monodromy, &mi, bound, prec)?.ok_or_else(|| {
        ContinuationError::FrameHypothesis(format!("invariants {mi} give monodromy outside Sp(4, Z)"))
    })?;
    // The period matrix at z = 0 is the mirror frame itself.
    let mum = mum_report("0", &mi.integral_frame(wp), &mi.normal_form(), &integral_at(&integral, &SingularLocation::zero()), prec)?;
    let report = FrameReport {
        precision: prec,
        base_point: base.to_string_digits(12),
        frame_source: source,
        mirror_invariants: mi,
        mum,
        loops: integral.iter().map(|(loc, mat)| LoopRecord { location: loc.to_string(), matrix: render(mat) }).collect(),
        log2_global_residual: residual,
    };
    Ok(FrameState {
        report,
        exit: system.infinity_exit().with_prec(wp),
        spoke_clearance: system.infinity.path.clearance,
        base,
        max_modulus,
        frame0,
        integral,
    })
}

/// One pass of the pipeline at fixed precision.
fn cross_mum_at(op: &PFOperator, options: &CrossMumOptions, prec: u32) -> Result<CrossMumReport, ContinuationError> {
    let wp = prec + GUARD_BITS;
    let state = frame_at(op, options, prec)?;
    let bound = &options.denominator_bound;
    let m = state.report.mirror_invariants.integral_frame(prec);

    // Continue ω at the base point to ω^∞ on the spoke to infinity.
    let frame_inf = LocalFrame::mum_infinity(op, &state.exit, state.max_modulus.max(f64::MIN_POSITIVE), wp)?;
    let spoke = PathSpec::open(state.base.clone(), vec![state.exit.clone()]).with_clearance(state.spoke_clearance);
    let c = transport_with(&numeric_ode(op, prec), &spoke, &state.frame0, &frame_inf, prec)?;
    let k = &m * &c.matrix;
    let k_inv = k.inverse().ok_or_else(|| ContinuationError::Frame("singular frame change".into()))?;
    let t2_numeric = TransportMatrix {
        matrix: &(&k * &to_complex(&local_monodromy_mum(), prec)) * &k_inv,
        precision: prec,
        log2_error: c.log2_error + (k.max_abs() * k_inv.max_abs()).max(1.0).log2() + 4.0,
    };
    let t2 = recognize_matrix(&t2_numeric, bound).and_then(|r| r.rational()).ok_or_else(|| {
        ContinuationError::Recognition(format!("monodromy at infinity not rational: {:?}", t2_numeric.render(25)))
    })?;
    if !is_integral(&t2) || !is_symplectic(&t2) {
        return Err(ContinuationError::FrameHypothesis(format!(
            "monodromy at infinity {:?} is not in Sp(4, Z)",
            render(&t2)
        )));
    }
    let infinity_loop_agrees = integral_at(&state.integral, &SingularLocation::Infinity) == t2;
    let (nf2, a) = normal_form(&t2)?;
    let a_inv = a.inverse().ok_or_else(|| ContinuationError::Frame("adapted basis not invertible".into()))?;
    let k2 = &to_complex(&a_inv, prec) * &k;
    let second = mum_report("infinity", &k2, &nf2, &t2, prec)?;
    let torelli = torelli_distinguish(&state.report.mum.point, &second.point, bound, prec);
    Ok(CrossMumReport { frame: state.report, second, infinity_loop_agrees, torelli })
}

fn integral_at(integral: &[(SingularLocation, Mat4<Rational>)], loc: &SingularLocation) -> Mat4<Rational> {
    integral.iter().find(|(l, _)| l == loc).map(|(_, m)| m.clone()).unwrap_or_else(|| Mat4::identity(&int(1)))
}

/// Limit data from a frame change `Π = K ω`: the period matrix is `K` with
/// unit diagonal.
fn mum_report(
    location: &str,
    k: &Mat4<BigComplex>,
    nf: &NormalForm,
    monodromy: &Mat4<Rational>,
    prec: u32,
) -> Result<MumPointReport, ContinuationError> {
    let diag: Vec<BigComplex> = (0..4).map(|j| k.get(j, j).clone()).collect();
    if diag.iter().any(|d| d.magnitude() == 0.0) {
        return Err(ContinuationError::Frame(format!("period matrix at {location} has a zero diagonal entry")));
    }
    let pm = PeriodMatrix::from_matrix(Mat4::from_fn(|i, j| k.get(i, j) / &diag[j]));
    let defect = pm.shape_defect(nf);
    let tolerance = 2f64.powf(-(f64::from(prec) / 4.0));
    let point = normalize_lhf(&pm, nf, tolerance)?;
    let ggk = invariants(nf)?;
    let kappa = crate::bigcomplex::kappa(point.pi.prec());
    Ok(MumPointReport {
        location: location.to_string(),
        normal_form: nf.clone(),
        invariants: ggk,
        pi: point.pi.to_string_digits(30),
        pi_over_kappa: (&point.pi / &kappa).to_string_digits(30),
        monodromy: render(monodromy),
        log2_shape_defect: if defect == 0.0 { -f64::from(prec) } else { defect.log2().max(-f64::from(prec)) },
        point,
    })
}

/// Conjugates every loop matrix into the integral frame of `mi`; `None`
/// if some matrix is not in `Sp(4, ℤ)` after recognition.
fn integral_loops(
    monodromy: &[LoopMonodromy],
    mi: &MirrorInvariants,
    bound: &BigInt,
    prec: u32,
) -> Result<Option<Vec<(SingularLocation, Mat4<Rational>)>>, ContinuationError> {
    let m = mi.integral_frame(prec);
    let m_inv = m.inverse().ok_or_else(|| ContinuationError::Frame("mirror frame not invertible".into()))?;
    let cond = (m.max_abs() * m_inv.max_abs()).max(1.0).log2();
    let mut out = Vec::with_capacity(monodromy.len());
    for l in monodromy {
        let t = TransportMatrix {
            matrix: &(&m * &l.matrix.matrix) * &m_inv,
            precision: prec,
            log2_error: l.matrix.log2_error + cond + 2.0,
        };
        let Some(r) = recognize_matrix(&t, bound) else {
            if t.log2_error > -(f64::from(prec) / 3.0) {
                return Err(ContinuationError::PrecisionExhausted(format!("loop around {} too inaccurate", l.location)));
            }
            return Ok(None);
        };
        match r.rational() {
            Some(q) if is_integral(&q) && is_symplectic(&q) => out.push((l.location.clone(), q)),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Reads `(deg, c₂·H, χ)` from a loop with `rank(T − I) = 1`: the first
/// row of `T − I`, moved by a power of the Pascal matrix into the form
/// `σ·(−χκ, −c₂·H/24, 0, −deg/6)`.
fn recognize_frame(
    monodromy: &[LoopMonodromy],
    bound: &BigInt,
    prec: u32,
) -> Result<(MirrorInvariants, FrameSource), ContinuationError> {
    let tol = 2f64.powf(-(f64::from(prec) / 4.0));
    let mut tried = Vec::new();
    for l in monodromy {
        if l.location == SingularLocation::zero() || l.location.is_infinity() {
            continue;
        }
        let one = BigComplex::from_f64(prec, 1.0, 0.0);
        let n = &l.matrix.matrix - &Mat4::identity(&one);
        if n.rank(tol) != 1 {
            continue;
        }
        let Some(candidate) = invariants_from_row(&n.row(0), bound, l.matrix.log2_error, prec) else {
            tried.push(l.location.to_string());
            continue;
        };
        if integral_loops(monodromy, &candidate, bound, prec)?.is_some() {
            let source = FrameSource::Recognized { conifold: l.location.to_string(), conjectural: true };
            return Ok((candidate, source));
        }
        tried.push(l.location.to_string());
    }
    Err(ContinuationError::Recognition(format!(
        "no conifold-type loop yields an integral frame (tried: {})",
        if tried.is_empty() { "none".to_string() } else { tried.join(", ") }
    )))
}

fn invariants_from_row(row: &[BigComplex; 4], bound: &BigInt, log2_error: f64, prec: u32) -> Option<MirrorInvariants> {
    let tol = (log2_error + 8.0).max(-(f64::from(prec) / 2.0));
    let (r, _) = recognize_vector(row, bound, tol)?;
    if !r[1].is_rational() || !r[2].is_rational() || !r[3].is_rational() || r[3].p == int(0) {
        return None;
    }
    // (r P^k)₂ = r₂ + 3k r₃ = 0
    let k = -(&r[2].p) / (&r[3].p * int(3));
    if !is_integer(&k) {
        return None;
    }
    let z1 = &r[1].p + &r[2].p * &k * int(2) + &r[3].p * &k * &k * int(3);
    let z0 = (
        &r[0].p + &r[1].p * &k + &r[2].p * &k * &k + &r[3].p * &k * &k * &k,
        r[0].q.clone(),
    );
    let z3 = r[3].p.clone();
    let sigma = if z3 < int(0) { int(1) } else { int(-1) };
    if z0.0 != int(0) {
        return None;
    }
    let degree = -&z3 * int(6) / &sigma;
    let c2 = -&z1 * int(24) / &sigma;
    let chi = -&z0.1 / &sigma;
    let as_i64 = |q: &Rational| {
        if is_integer(q) {
            i64::try_from(q.to_integer()).ok()
        } else {
            None
        }
    };
    Some(MirrorInvariants::new(as_i64(&degree)?, as_i64(&c2)?, as_i64(&chi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn row_recognition_inverts_frame() {
        // First row of the conifold monodromy σ·(−χκ, −c₂/24, 0, −d/6) shifted by P^{-k}.
        let prec = 256;
        let mi = MirrorInvariants::new(5, 50, -200);
        let kappa = crate::bigcomplex::kappa(prec);
        let z = [kappa.mul_i64(200), BigComplex::from_rational(prec, &rat(-50, 24)), BigComplex::zero(prec), BigComplex::from_rational(prec, &rat(-5, 6))];
        // row = Z P^{-2}
        let p = to_complex(&local_monodromy_mum(), prec).inverse().unwrap().pow(2);
        let row: [BigComplex; 4] = std::array::from_fn(|j| {
            (0..4).fold(BigComplex::zero(prec), |acc, i| &acc + &(&z[i] * p.get(i, j)))
        });
        let found = invariants_from_row(&row, &BigInt::from(1_000_000), -200.0, prec).unwrap();
        assert_eq!(found, mi);
    }
}
