//! Taylor-series stepping for `Σ_k c_k(z) y^{(k)} = 0`.
//!
//! A state is a 4×4 matrix whose column `j` holds the normalized Taylor
//! coefficients `(y, y′, y″/2, y‴/6)` of solution `j` at the current point.

use crate::bigcomplex::BigComplex;
use crate::matrix::Mat4;
use crate::picard_fuchs::poly::Poly;
use crate::picard_fuchs::{PFOperator, SingularPoint};
use crate::scalar::{ComplexField, Field, Scalar};

use super::ContinuationError;

/// Step radius as a fraction of the distance to the nearest singularity.
pub const STEP_FRACTION: f64 = 0.5;

/// Guard bits carried above the requested precision.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone)]
pub struct NumericOde {
    coeffs: [Poly<BigComplex>; 5],
    singular: Vec<(f64, f64)>,
    prec: u32,
}

/// Result of integrating along a polygonal path.
#[derive(Debug, Clone)]
pub struct Propagation {
    /// Maps initial states to final states: `W_end = Φ · W_start`.
    pub matrix: Mat4<BigComplex>,
    /// Heuristic bound on `log₂` of the absolute error in `Φ`.
    pub log2_error: f64,
    pub steps: usize,
}

impl NumericOde {
    /// `prec` is the working precision including guard bits.
    pub fn new(op: &PFOperator, points: &[SingularPoint], prec: u32) -> Self {
        let coeffs = op.d_form().map(|p| p.map(|c| BigComplex::from_rational(prec, c)));
        let singular = points.iter().filter_map(|p| p.location.approx_f64()).collect();
        NumericOde { coeffs, singular, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn singular(&self) -> &[(f64, f64)] {
        &self.singular
    }

    pub fn distance_to_singular(&self, z: (f64, f64)) -> f64 {
        self.singular.iter().map(|s| (s.0 - z.0).hypot(s.1 - z.1)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance from the segment `[a, b]` to a singular point.
    pub fn segment_clearance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        self.singular
            .iter()
            .map(|&s| segment_point_distance(a, b, s))
            .fold(f64::INFINITY, f64::min)
    }

    /// One Taylor step of length `h` from `z0`; returns the new state and
    /// an estimate of the truncation error relative to the state scale.
    fn step(&self, z0: &BigComplex, state: &Mat4<BigComplex>, h: &BigComplex) -> Result<(Mat4<BigComplex>, f64), ContinuationError> {
        let shifted: Vec<Vec<BigComplex>> = self.coeffs.iter().map(|p| p.taylor_shift(z0).coeffs().to_vec()).collect();
        let lead = shifted[4]
            .first()
            .cloned()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| ContinuationError::Clearance(format!("step starts on a singular point {}", z0.to_string_digits(10))))?;
        let inv_lead = lead.recip();
        let tol_log2 = -(f64::from(self.prec) + 10.0);
        let h_log2 = h.log2_magnitude();
        let zero = BigComplex::zero(self.prec);

        // y[n][j]: Taylor coefficient n of solution j.
        let mut y: Vec<[BigComplex; 4]> = (0..4).map(|n| state.row(n)).collect();
        let scale_log2 = (0..4)
            .flat_map(|n| {
                let y = &y;
                (0..4).map(move |j| y[n][j].log2_magnitude() + n as f64 * h_log2)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let max_terms = 64 + 16 * self.prec as usize;
        let mut small_run = 0;
        let mut last_tail = f64::NEG_INFINITY;
        let mut n_top = 3;
        while n_top < max_terms {
            let big_n = n_top - 3;
            let mut acc: [BigComplex; 4] = std::array::from_fn(|_| zero.clone());
            for (k, ck) in shifted.iter().enumerate() {
                for (m, c) in ck.iter().enumerate() {
                    if (k == 4 && m == 0) || m > big_n || c.is_zero() {
                        continue;
                    }
                    let base = big_n - m;
                    let idx = base + k;
                    let ff = falling(idx, k);
                    let cf = c.mul_i64(ff);
                    for j in 0..4 {
                        acc[j] = &acc[j] + &(&cf * &y[idx][j]);
                    }
                }
            }
            let denom = inv_lead.div_i64(falling(big_n + 4, 4));
            let next: [BigComplex; 4] = std::array::from_fn(|j| -(&acc[j] * &denom));
            n_top += 1;
            let size = next
                .iter()
                .map(|v| v.log2_magnitude())
                .fold(f64::NEG_INFINITY, f64::max)
                + n_top as f64 * h_log2;
            y.push(next);
            if size - scale_log2 < tol_log2 {
                small_run += 1;
                last_tail = last_tail.max(size - scale_log2);
                if small_run >= 4 {
                    break;
                }
            } else {
                small_run = 0;
                last_tail = f64::NEG_INFINITY;
            }
        }
        if small_run < 4 {
            return Err(ContinuationError::PrecisionExhausted(format!(
                "Taylor series did not converge within {max_terms} terms"
            )));
        }
        // Re-expand at z0 + h: Y_k = Σ_n C(n,k) y_n h^{n−k}.
        let mut out: [[BigComplex; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
        let mut hp = vec![zero.one_like()];
        for n in 1..y.len() {
            hp.push(&hp[n - 1] * h);
        }
        for (n, yn) in y.iter().enumerate() {
            for k in 0..4.min(n + 1) {
                let w = hp[n - k].mul_i64(binomial(n, k));
                for j in 0..4 {
                    out[k][j] = &out[k][j] + &(&w * &yn[j]);
                }
            }
        }
        // Geometric tail with ratio at most one half plus rounding.
        let rounding = -(f64::from(self.prec)) + (y.len() as f64).log2() + 4.0;
        Ok((Mat4::from_rows(out), (last_tail + 1.0).max(rounding) + scale_log2))
    }

    /// Integrates the identity state along `waypoints`, subdividing each
    /// segment so that every step stays within [`STEP_FRACTION`] of the
    /// distance to the nearest singularity.
    pub fn propagate(&self, waypoints: &[BigComplex], clearance: f64) -> Result<Propagation, ContinuationError> {
        let one = BigComplex::from_f64(self.prec, 1.0, 0.0);
        let mut state = Mat4::identity(&one);
        let mut err = 0.0f64;
        let mut steps = 0;
        for pair in waypoints.windows(2) {
            let (a, b) = (pair[0].with_prec(self.prec), pair[1].with_prec(self.prec));
            let (af, bf) = ((a.re_f64(), a.im_f64()), (b.re_f64(), b.im_f64()));
            let gap = self.segment_clearance(af, bf);
            if !(gap > clearance) {
                return Err(ContinuationError::Clearance(format!(
                    "segment from {} to {} passes within {gap:e} of a singular point",
                    a.to_string_digits(8),
                    b.to_string_digits(8)
                )));
            }
            let mut z = a.clone();
            loop {
                let zf = (z.re_f64(), z.im_f64());
                let remaining = &b - &z;
                let rem = remaining.magnitude();
                if rem == 0.0 {
                    break;
                }
                let radius = STEP_FRACTION * self.distance_to_singular(zf);
                let (h, last) = if rem <= radius {
                    (remaining, true)
                } else {
                    (remaining.scale(&rug::Float::with_val(self.prec, radius / rem)), false)
                };
                let (next, step_err) = self.step(&z, &state, &h)?;
                state = next;
                err += step_err.exp2();
                steps += 1;
                if last {
                    break;
                }
                z = &z + &h;
                if steps > 1_000_000 {
                    return Err(ContinuationError::Clearance("path requires too many steps".into()));
                }
            }
        }
        let log2_error = if err == 0.0 { -(f64::from(self.prec)) } else { err.log2() };
        Ok(Propagation { matrix: state, log2_error, steps })
    }
}

fn segment_point_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    (a.0 + t * dx - p.0).hypot(a.1 + t * dy - p.1)
}

/// `n (n−1) ⋯ (n−k+1)`.
fn falling(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64)
}

fn binomial(n: usize, k: usize) -> i64 {
    falling(n, k) / falling(k, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::singular_points;
    use crate::rational::int;

    fn theta4() -> PFOperator {
        PFOperator::new(vec![[int(0), int(0), int(0), int(0), int(1)]]).unwrap()
    }

    #[test]
    fn segment_distance() {
        assert!((segment_point_distance((0.0, 0.0), (2.0, 0.0), (1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((segment_point_distance((0.0, 0.0), (2.0, 0.0), (3.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_solution_continues_exactly() {
        // Θ⁴ has the solution log z; along 1 → 2 its jet is (log 2, 1/2, −1/8, 1/24).
        let op = theta4();
        let pts = singular_points(&op, 128);
        let ode = NumericOde::new(&op, &pts, 160);
        let path = [BigComplex::from_f64(160, 1.0, 0.0), BigComplex::from_f64(160, 2.0, 0.0)];
        let prop = ode.propagate(&path, 0.0).unwrap();
        // Initial jet of log z at 1: (0, 1, −1/2, 1/3).
        let init = [0.0, 1.0, -0.5, 1.0 / 3.0].map(|x| BigComplex::from_f64(160, x, 0.0));
        let end = prop.matrix.apply(&init);
        let expected = [std::f64::consts::LN_2, 0.5, -0.125, 1.0 / 24.0];
        for k in 0..4 {
            assert!((end[k].re_f64() - expected[k]).abs() < 1e-15, "k = {k}");
        }
        assert!(prop.log2_error < -100.0);
    }

    #[test]
    fn path_through_singularity_rejected() {
        let op = theta4();
        let pts = singular_points(&op, 64);
        let ode = NumericOde::new(&op, &pts, 64);
        let path = [BigComplex::from_f64(64, -1.0, 0.0), BigComplex::from_f64(64, 1.0, 0.0)];
        assert!(matches!(ode.propagate(&path, 1e-9), Err(ContinuationError::Clearance(_))));
    }
}
