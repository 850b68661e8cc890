//! Loop systems, transport between frames and monodromy representations.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use rug::Float;
use serde::Serialize;

use crate::bigcomplex::{kappa, kappa_im, BigComplex};
use crate::matrix::Mat4;
use crate::picard_fuchs::{singular_points, PFOperator, SingularLocation, SingularPoint};
use crate::rational::{format_rational, int, Rational};
use crate::recognize::{rational_reconstruct_within, recognition_tolerance};
use crate::scalar::ComplexField;

use super::frames::{frame_jets, LocalFrame};
use super::ode::{NumericOde, GUARD_BITS};
use super::path::PathSpec;
use super::{log2_sum, ContinuationError, TransportMatrix};

/// Sides of the polygon around a finite singular point.
pub const LOOP_SIDES: usize = 16;
/// Sides of the polygon around infinity.
pub const INFINITY_SIDES: usize = 32;

/// A based loop around one singular point.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    pub location: SingularLocation,
    pub path: PathSpec,
}

/// Loops around every finite singular point, ordered so that
/// `T₁ ⋯ Tₙ · T_∞ = I`, and a clockwise loop around infinity.
#[derive(Debug, Clone)]
pub struct LoopSystem {
    pub base: BigComplex,
    /// Direction (seen from the base point) of the spoke to infinity.
    pub cut_angle: f64,
    /// Radius of the circle around infinity, centred at the base point.
    pub infinity_radius: f64,
    pub loops: Vec<LoopSpec>,
    pub infinity: LoopSpec,
}

impl LoopSystem {
    /// Finite loops followed by the loop at infinity.
    pub fn all(&self) -> impl Iterator<Item = &LoopSpec> {
        self.loops.iter().chain(std::iter::once(&self.infinity))
    }

    /// Point on the spoke to infinity at distance `radius` from the base.
    pub fn infinity_exit(&self) -> BigComplex {
        let prec = self.base.prec();
        let (bx, by) = (self.base.re_f64(), self.base.im_f64());
        let r = self.infinity_radius;
        dyadic(prec, bx + r * self.cut_angle.cos(), by + r * self.cut_angle.sin(), r)
    }
}

fn finite_points(points: &[SingularPoint]) -> Vec<(SingularLocation, (f64, f64))> {
    points.iter().filter_map(|p| p.location.approx_f64().map(|z| (p.location.clone(), z))).collect()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    dist((a.0 + t * dx, a.1 + t * dy), p)
}

/// Rounds to a multiple of a power of two about `2⁻²⁴·scale`.
fn dyadic(prec: u32, x: f64, y: f64, scale: f64) -> BigComplex {
    let quantum = (scale.log2().floor() - 24.0).exp2();
    BigComplex::from_f64(prec, (x / quantum).round() * quantum, (y / quantum).round() * quantum)
}

/// Smallest distance from a spoke `b → s` to another singular point, and
/// from `b` to any singular point.
fn spoke_clearance(b: (f64, f64), pts: &[(f64, f64)]) -> f64 {
    let mut best = pts.iter().map(|&s| dist(b, s)).fold(f64::INFINITY, f64::min);
    for (i, &s) in pts.iter().enumerate() {
        for (j, &t) in pts.iter().enumerate() {
            if i != j {
                best = best.min(segment_distance(b, s, t));
            }
        }
    }
    best
}

/// Base point at half the distance from `0` to the nearest other singular
/// point, at the angle `kπ/12` maximizing spoke clearance.
pub fn choose_base_point(points: &[SingularPoint], prec: u32) -> BigComplex {
    let pts: Vec<(f64, f64)> = finite_points(points).into_iter().map(|(_, z)| z).collect();
    let r0 = pts.iter().map(|&(x, y)| x.hypot(y)).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let radius = if r0.is_finite() { r0 / 2.0 } else { 1.0 };
    let mut best = (f64::NEG_INFINITY, BigComplex::from_f64(prec, radius, 0.0));
    for k in 0..24 {
        let theta = f64::from(k) * PI / 12.0;
        let b = dyadic(prec, radius * theta.cos(), radius * theta.sin(), radius);
        let score = spoke_clearance((b.re_f64(), b.im_f64()), &pts);
        // strict comparison keeps the first of equally good angles
        if score > best.0 * (1.0 + 1e-9) {
            best = (score, b);
        }
    }
    best.1
}

/// Spokes with small circles around each finite singular point, ordered
/// counterclockwise by spoke direction starting after the spoke to
/// infinity, which bisects the widest angular gap.
pub fn automatic_loops(points: &[SingularPoint], base: &BigComplex) -> Result<LoopSystem, ContinuationError> {
    let finite = finite_points(points);
    let b = (base.re_f64(), base.im_f64());
    let pts: Vec<(f64, f64)> = finite.iter().map(|(_, z)| *z).collect();
    let clearance = spoke_clearance(b, &pts);
    if !(clearance > 0.0) {
        return Err(ContinuationError::Clearance("base point lies on a singular point or a spoke".into()));
    }
    let mut angles: Vec<f64> = pts.iter().map(|s| (s.1 - b.1).atan2(s.0 - b.0).rem_euclid(TAU)).collect();
    let cut_angle = widest_gap_bisector(&angles);
    let mut loops: Vec<(f64, LoopSpec)> = Vec::with_capacity(finite.len());
    for (i, (location, s)) in finite.iter().enumerate() {
        let nearest_other =
            pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| dist(*s, *t)).fold(f64::INFINITY, f64::min);
        let radius = (nearest_other / 3.0).min(dist(*s, b) / 3.0).min(clearance / 2.0);
        let path = PathSpec::spoke_loop(base, *s, radius, LOOP_SIDES, true).with_clearance(radius / 2.0);
        let key = (angles[i] - cut_angle).rem_euclid(TAU);
        loops.push((key, LoopSpec { location: location.clone(), path }));
    }
    loops.sort_by(|x, y| x.0.total_cmp(&y.0));
    angles.sort_by(f64::total_cmp);
    let far = pts.iter().map(|&s| dist(s, b)).fold(0.0, f64::max);
    let infinity_radius = 2.0 * far + 1.0;
    let mut system = LoopSystem {
        base: base.clone(),
        cut_angle,
        infinity_radius,
        loops: loops.into_iter().map(|(_, l)| l).collect(),
        infinity: LoopSpec { location: SingularLocation::Infinity, path: PathSpec::open(base.clone(), Vec::new()) },
    };
    let exit = system.infinity_exit();
    let exit = (exit.re_f64(), exit.im_f64());
    let spoke_gap = pts.iter().map(|&s| segment_distance(b, exit, s)).fold(f64::INFINITY, f64::min);
    system.infinity = LoopSpec { location: SingularLocation::Infinity, path: infinity_path(&system, spoke_gap.min(far) / 2.0) };
    Ok(system)
}

fn infinity_path(system: &LoopSystem, clearance: f64) -> PathSpec {
    let base = &system.base;
    let prec = base.prec();
    let (bx, by) = (base.re_f64(), base.im_f64());
    let r = system.infinity_radius;
    let mut w = Vec::with_capacity(INFINITY_SIDES + 1);
    w.push(system.infinity_exit());
    for k in 1..INFINITY_SIDES {
        let theta = system.cut_angle - TAU * k as f64 / INFINITY_SIDES as f64;
        w.push(dyadic(prec, bx + r * theta.cos(), by + r * theta.sin(), r));
    }
    w.push(system.infinity_exit());
    PathSpec::closed(base.clone(), w).with_clearance(clearance)
}

fn widest_gap_bisector(angles: &[f64]) -> f64 {
    if angles.is_empty() {
        return 0.0;
    }
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..sorted.len() {
        let a = sorted[i];
        let next = if i + 1 < sorted.len() { sorted[i + 1] } else { sorted[0] + TAU };
        if next - a > best.0 {
            best = (next - a, (a + (next - a) / 2.0).rem_euclid(TAU));
        }
    }
    best.1
}

/// Integrator with singular points of `op` at working precision
/// `prec + GUARD_BITS`.
pub(crate) fn numeric_ode(op: &PFOperator, prec: u32) -> NumericOde {
    let wp = prec + GUARD_BITS;
    NumericOde::new(op, &singular_points(op, wp), wp)
}

/// `T` with `f = T g` for the continuation of the start frame `f` along
/// `path` and the end frame `g` at the path end.
pub fn transport(
    op: &PFOperator,
    path: &PathSpec,
    start: &LocalFrame,
    end: &LocalFrame,
    prec: u32,
) -> Result<TransportMatrix, ContinuationError> {
    transport_with(&numeric_ode(op, prec), path, start, end, prec)
}

pub(crate) fn transport_with(
    ode: &NumericOde,
    path: &PathSpec,
    start: &LocalFrame,
    end: &LocalFrame,
    prec: u32,
) -> Result<TransportMatrix, ContinuationError> {
    let wp = ode.prec();
    let vertices: Vec<BigComplex> = path.vertices().iter().map(|z| z.with_prec(wp)).collect();
    let f_start = frame_jets(start, &vertices[0])?;
    let g_end = frame_jets(end, vertices.last().expect("nonempty"))?;
    transport_states(ode, &vertices, path.clearance, &f_start, &g_end, prec)
}

pub(crate) fn transport_states(
    ode: &NumericOde,
    vertices: &[BigComplex],
    clearance: f64,
    f_start: &Mat4<BigComplex>,
    g_end: &Mat4<BigComplex>,
    prec: u32,
) -> Result<TransportMatrix, ContinuationError> {
    let prop = ode.propagate(vertices, clearance)?;
    let g_inv = g_end
        .inverse()
        .ok_or_else(|| ContinuationError::Frame("end frame is not a fundamental system".into()))?;
    let x = &(&g_inv * &prop.matrix) * f_start;
    let condition = (g_inv.max_abs() * f_start.max_abs()).max(1.0).log2();
    let rounding = -(f64::from(ode.prec())) + 8.0 + condition;
    // final rounding to `prec` bits
    let output = -(f64::from(prec)) + x.max_abs().max(1.0).log2() + 1.0;
    let log2_error = log2_sum(log2_sum(prop.log2_error + condition + 4.0, rounding), output);
    let t = TransportMatrix { matrix: x.transpose().map(|v| v.with_prec(prec)), precision: prec, log2_error };
    if log2_error > -(f64::from(prec) / 4.0) {
        return Err(ContinuationError::PrecisionExhausted(format!(
            "transport error estimate 2^{log2_error:.1} exceeds 2^-{}",
            prec / 4
        )));
    }
    Ok(t)
}

/// Monodromy of one loop in the common frame.
#[derive(Debug, Clone)]
pub struct LoopMonodromy {
    pub location: SingularLocation,
    pub matrix: TransportMatrix,
}

/// Monodromy matrices of all loops (finite ones, then infinity) in the
/// frame `frame` at the common base point. Loops run concurrently.
pub fn monodromy_representation(
    op: &PFOperator,
    base: &BigComplex,
    loops: &[LoopSpec],
    frame: &LocalFrame,
    prec: u32,
) -> Result<Vec<LoopMonodromy>, ContinuationError> {
    let ode = numeric_ode(op, prec);
    let wp = ode.prec();
    let base = base.with_prec(wp);
    let f = frame_jets(frame, &base)?;
    let results: Vec<Result<TransportMatrix, ContinuationError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = loops
            .iter()
            .map(|l| {
                let (ode, f, base) = (&ode, &f, &base);
                scope.spawn(move || {
                    if l.path.base != *base && l.path.base.with_prec(wp) != *base {
                        return Err(ContinuationError::Clearance("loop does not start at the base point".into()));
                    }
                    let vertices: Vec<BigComplex> = l.path.vertices().iter().map(|z| z.with_prec(wp)).collect();
                    transport_states(ode, &vertices, l.path.clearance, f, f, prec)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("transport thread panicked")).collect()
    });
    loops
        .iter()
        .zip(results)
        .map(|(l, r)| r.map(|matrix| LoopMonodromy { location: l.location.clone(), matrix }))
        .collect()
}

/// `log₂ max |(T₁ ⋯ Tₙ T_∞ − I)ᵢⱼ|` for loop matrices in the order of a
/// [`LoopSystem`].
pub fn log2_global_residual(monodromy: &[LoopMonodromy]) -> f64 {
    let prec = monodromy.first().map_or(64, |m| m.matrix.precision);
    let product = monodromy.iter().fold(TransportMatrix::identity(prec), |acc, m| acc.compose(&m.matrix));
    product.log2_distance_to_identity()
}

/// Monodromy of the automatic loop system in the Frobenius frame at `0`.
#[derive(Debug, Clone)]
pub struct GlobalMonodromy {
    pub system: LoopSystem,
    pub loops: Vec<LoopMonodromy>,
    pub log2_residual: f64,
}

/// Loops around every finite singular point and around `∞` from `base`
/// (automatic when `None`), expressed in the Frobenius frame at the MUM
/// point `z = 0`.
pub fn global_monodromy(op: &PFOperator, base: Option<&BigComplex>, prec: u32) -> Result<GlobalMonodromy, ContinuationError> {
    let wp = prec + GUARD_BITS;
    let points = singular_points(op, wp);
    let base = match base {
        Some(b) => b.with_prec(wp),
        None => choose_base_point(&points, wp),
    };
    let system = automatic_loops(&points, &base)?;
    let r0 = points
        .iter()
        .filter_map(|p| p.location.approx_f64())
        .map(|(x, y)| x.hypot(y))
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let frame = LocalFrame::mum_zero(op, &base, if r0.is_finite() { r0 } else { f64::MAX }, wp)?;
    let specs: Vec<LoopSpec> = system.all().cloned().collect();
    let loops = monodromy_representation(op, &base, &specs, &frame, prec)?;
    let log2_residual = log2_global_residual(&loops);
    Ok(GlobalMonodromy { system, loops, log2_residual })
}

/// Outcome of testing `(T − I)^k ≈ 0`.
#[derive(Debug, Clone)]
pub struct UnipotencyReport {
    pub k: u32,
    /// `log₂ max |((T − I)^k)ᵢⱼ|`; `−∞` for an exact zero.
    pub log2_norm: f64,
    pub log2_tolerance: f64,
    pub passes: bool,
    /// `log T = Σ_{j<k} (−1)^{j+1} (T − I)^j / j` when the test passes.
    pub log: Option<Mat4<BigComplex>>,
}

pub fn verify_unipotent_log(t: &TransportMatrix, k: u32) -> UnipotencyReport {
    let prec = t.precision;
    let one = BigComplex::from_f64(prec, 1.0, 0.0);
    let m = &t.matrix - &Mat4::identity(&one);
    let power = if k == 0 { Mat4::identity(&one) } else { m.pow(k) };
    let log2_norm = max_log2(&power);
    let scale = t.matrix.max_abs().max(1.0).log2() * f64::from(k.max(1));
    let log2_tolerance = (t.log2_error + scale + 8.0).max(-(f64::from(prec) / 2.0));
    let passes = log2_norm < log2_tolerance;
    let log = passes.then(|| {
        let mut acc = Mat4::zero(&one);
        let mut p = Mat4::identity(&one);
        for j in 1..k.max(1) {
            p = &p * &m;
            let c = BigComplex::from_f64(prec, if j % 2 == 1 { 1.0 } else { -1.0 }, 0.0).div_i64(i64::from(j));
            acc = &acc + &p.scale(&c);
        }
        acc
    });
    UnipotencyReport { k, log2_norm, log2_tolerance, passes, log }
}

fn max_log2(m: &Mat4<BigComplex>) -> f64 {
    m.rows().iter().flatten().map(|x| x.log2_magnitude()).fold(f64::NEG_INFINITY, f64::max)
}

/// Exact value `p + q·κ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizedEntry {
    pub p: Rational,
    pub q: Rational,
}

impl RecognizedEntry {
    pub fn rational(p: Rational) -> Self {
        RecognizedEntry { p, q: int(0) }
    }

    pub fn is_rational(&self) -> bool {
        self.q == int(0)
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        &BigComplex::from_rational(prec, &self.p) + &kappa(prec).scale(&crate::rational::rational_to_float(&self.q, prec))
    }
}

impl std::fmt::Display for RecognizedEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.p == int(0), self.q == int(0)) {
            (_, true) => f.write_str(&format_rational(&self.p)),
            (true, false) => write!(f, "{}*kappa", format_rational(&self.q)),
            (false, false) => write!(f, "{} + {}*kappa", format_rational(&self.p), format_rational(&self.q)),
        }
    }
}

impl Serialize for RecognizedEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecognizedMatrix {
    pub entries: [[RecognizedEntry; 4]; 4],
    /// `log₂` of the largest deviation between input and recognized value.
    pub log2_residual: f64,
}

impl RecognizedMatrix {
    /// The exact matrix when every entry is rational.
    pub fn rational(&self) -> Option<Mat4<Rational>> {
        if self.entries.iter().flatten().all(RecognizedEntry::is_rational) {
            Some(Mat4::from_fn(|i, j| self.entries[i][j].p.clone()))
        } else {
            None
        }
    }
}

/// Tolerance for recognizing a value carried at `prec` bits with the given
/// error estimate.
fn tolerance_log2(prec: u32, log2_error: f64) -> f64 {
    (log2_error + 8.0).max(-(f64::from(prec) / 2.0))
}

/// Decomposes each value as `p + q·κ` with denominators up to `bound`.
pub fn recognize_vector(values: &[BigComplex], bound: &BigInt, log2_tolerance: f64) -> Option<(Vec<RecognizedEntry>, f64)> {
    if log2_tolerance > -20.0 {
        return None;
    }
    let tol = Float::with_val(64, log2_tolerance).exp2();
    let mut residual = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let prec = v.prec();
        let p = rational_reconstruct_within(v.re(), bound, &tol)?;
        let ratio = Float::with_val(prec, v.im() / kappa_im(prec));
        // The imaginary part is divided by Im κ ≈ 0.0048; scale the tolerance.
        let q_tol = Float::with_val(64, &tol / kappa_im(64));
        let q = rational_reconstruct_within(&ratio, bound, &q_tol)?;
        let e = RecognizedEntry { p, q };
        residual = residual.max((v - &e.to_complex(prec)).log2_magnitude());
        out.push(e);
    }
    Some((out, residual))
}

/// Entrywise [`recognize_vector`]; `None` if any entry fails.
pub fn recognize_matrix(t: &TransportMatrix, bound: &BigInt) -> Option<RecognizedMatrix> {
    let flat: Vec<BigComplex> = t.matrix.rows().iter().flatten().cloned().collect();
    let (entries, log2_residual) = recognize_vector(&flat, bound, tolerance_log2(t.precision, t.log2_error))?;
    let mut it = entries.into_iter();
    let entries = std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("16 entries")));
    Some(RecognizedMatrix { entries, log2_residual })
}

/// Default recognition tolerance for a value at `prec` bits, as `log₂`.
pub fn default_log2_tolerance(prec: u32) -> f64 {
    recognition_tolerance(prec).to_f64().log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::scalar::Scalar;

    fn theta4() -> PFOperator {
        PFOperator::new(vec![[int(0), int(0), int(0), int(0), int(1)]]).unwrap()
    }

    #[test]
    fn empty_path_is_identity() {
        let op = theta4();
        let base = BigComplex::from_f64(128, 1.0, 0.0);
        let t = transport(&op, &PathSpec::open(base, Vec::new()), &LocalFrame::Standard, &LocalFrame::Standard, 128).unwrap();
        assert!(t.distance_to_identity() == 0.0);
    }

    #[test]
    fn loop_without_singularity_is_trivial() {
        let op = theta4();
        let base = BigComplex::from_f64(128, 1.0, 0.0);
        let path = PathSpec::spoke_loop(&base, (2.0, 0.0), 0.5, 16, true);
        let t = transport(&op, &path, &LocalFrame::Standard, &LocalFrame::Standard, 128).unwrap();
        assert!(t.log2_distance_to_identity() < -90.0);
    }

    #[test]
    fn theta4_loop_is_pascal() {
        let op = theta4();
        let base = BigComplex::from_f64(160, 0.5, 0.25);
        let frame = LocalFrame::mum_zero(&op, &base, 1e9, 192).unwrap();
        let path = PathSpec::spoke_loop(&base, (0.0, 0.0), 0.2, 16, true).with_clearance(0.1);
        let t = transport(&op, &path, &frame, &frame, 160).unwrap();
        let pascal = crate::picard_fuchs::local_monodromy_mum().map(|q| BigComplex::from_rational(160, q));
        assert!((&t.matrix - &pascal).max_abs() < 1e-40);
        let report = verify_unipotent_log(&t, 4);
        assert!(report.passes);
        assert!(!verify_unipotent_log(&t, 3).passes);
    }

    #[test]
    fn unipotency_examples() {
        let prec = 128;
        let exact = |m: Mat4<Rational>| TransportMatrix {
            matrix: m.map(|q| BigComplex::from_rational(prec, q)),
            precision: prec,
            log2_error: -(f64::from(prec)),
        };
        let pascal = exact(crate::picard_fuchs::local_monodromy_mum());
        let r = verify_unipotent_log(&pascal, 4);
        assert_eq!(r.log2_norm, f64::NEG_INFINITY);
        let log = r.log.unwrap();
        for (i, v) in [(1, 1.0), (2, 2.0), (3, 3.0)] {
            assert!((log.get(i, i - 1).re_f64() - v).abs() < 1e-30);
        }
        assert!(log.get(2, 0).magnitude() < 1e-30);
        let id = exact(Mat4::identity(&int(1)));
        let r = verify_unipotent_log(&id, 1);
        assert!(r.passes && r.log.unwrap().max_abs() == 0.0);
        let mut sq = Mat4::identity(&int(1));
        sq.set(3, 0, int(1));
        let sq = exact(sq);
        assert!(verify_unipotent_log(&sq, 2).passes);
        assert!(!verify_unipotent_log(&sq, 1).passes);
    }

    #[test]
    fn recognition_examples() {
        let bound = BigInt::from(1_000_000);
        let half = BigComplex::from_f64(128, 0.5, 0.0);
        let (e, _) = recognize_vector(&[half], &bound, default_log2_tolerance(128)).unwrap();
        assert_eq!(e[0], RecognizedEntry::rational(rat(1, 2)));

        let v = kappa(300).mul_i64(-200);
        let (e, _) = recognize_vector(&[v], &bound, default_log2_tolerance(300)).unwrap();
        assert_eq!(e[0], RecognizedEntry { p: int(0), q: int(-200) });

        let root = Float::with_val(128, 0.5f64).sqrt();
        let v = BigComplex::from_real(root);
        assert!(recognize_vector(&[v], &bound, default_log2_tolerance(128)).is_none());
    }

    #[test]
    fn widest_gap() {
        let b = widest_gap_bisector(&[0.0, 1.0, 2.0]);
        assert!((b - (2.0 + (TAU - 2.0) / 2.0)).abs() < 1e-12);
    }
}
