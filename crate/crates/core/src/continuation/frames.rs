//! Local solution frames and their Taylor jets at a regular point.

use crate::bigcomplex::BigComplex;
use crate::matrix::Mat4;
use crate::picard_fuchs::{frobenius_basis, FrobeniusBasis, PFOperator};
use crate::rational::Rational;
use crate::scalar::{ComplexField, Field, Scalar};
use crate::series::TruncatedSeries;

use super::ContinuationError;

/// Extra Frobenius terms beyond the convergence estimate.
const FROBENIUS_SLACK: usize = 64;

/// An ordered quadruple of local solutions.
#[derive(Debug, Clone)]
pub enum LocalFrame {
    /// The solutions with Taylor state equal to the identity at the point
    /// where the frame is evaluated.
    Standard,
    /// `(ω₃, ω₂, ω₁, ω₀)` at a MUM point `z = 0` with exponent `0`.
    MumZero(FrobeniusBasis<BigComplex>),
    /// `w^ρ·(ω₃, ω₂, ω₁, ω₀)` in `w = 1/z` at a MUM point `z = ∞` with
    /// exponent `ρ`.
    MumInfinity { basis: FrobeniusBasis<BigComplex>, rho: Rational },
}

/// Truncation order making the Frobenius tail negligible at `wp` bits for
/// `|x| / radius = ratio < 1`.
fn frobenius_order(wp: u32, ratio: f64) -> Result<usize, ContinuationError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ContinuationError::Frame(format!("point outside the convergence disc (ratio {ratio})")));
    }
    Ok((f64::from(wp) / -ratio.log2()).ceil() as usize + FROBENIUS_SLACK)
}

impl LocalFrame {
    /// Frobenius frame at `z = 0` accurate at `|z| ≤ |z0|`, where
    /// `radius` is the distance from `0` to the nearest other singular point.
    pub fn mum_zero(op: &PFOperator, z0: &BigComplex, radius: f64, prec: u32) -> Result<Self, ContinuationError> {
        let order = frobenius_order(prec, z0.magnitude() / radius)?;
        let basis = frobenius_basis(op, order, &BigComplex::zero(prec))?;
        Ok(LocalFrame::MumZero(basis))
    }

    /// Frobenius frame at `z = ∞` accurate at `|z| ≥ |z0|`, where every
    /// finite singular point lies in `|z| ≤ max_modulus`.
    pub fn mum_infinity(op: &PFOperator, z0: &BigComplex, max_modulus: f64, prec: u32) -> Result<Self, ContinuationError> {
        let (local, rho) = op.localized_at_infinity()?;
        let order = frobenius_order(prec, max_modulus / z0.magnitude())?;
        let basis = frobenius_basis(&local, order, &BigComplex::zero(prec))?;
        Ok(LocalFrame::MumInfinity { basis, rho })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LocalFrame::Standard => "standard",
            LocalFrame::MumZero(_) => "frobenius-0",
            LocalFrame::MumInfinity { .. } => "frobenius-infinity",
        }
    }
}

/// State matrix of `frame` at `z0`: column `j` holds the normalized Taylor
/// coefficients `(y, y′, y″/2, y‴/6)` of solution `j`. Logarithms take the
/// principal branch at `z0`.
pub fn frame_jets(frame: &LocalFrame, z0: &BigComplex) -> Result<Mat4<BigComplex>, ContinuationError> {
    let prec = z0.prec();
    match frame {
        LocalFrame::Standard => Ok(Mat4::identity(&BigComplex::from_f64(prec, 1.0, 0.0))),
        LocalFrame::MumZero(basis) => {
            if z0.is_zero() {
                return Err(ContinuationError::Frame("jets requested at the MUM point itself".into()));
            }
            let jets = basis.omega_jets(z0, &z0.ln(), 3);
            Ok(jets_to_state(&jets))
        }
        LocalFrame::MumInfinity { basis, rho } => {
            if z0.is_zero() {
                return Err(ContinuationError::Frame("jets at z = 0 in the frame at infinity".into()));
            }
            let w1 = z0.recip();
            let log_w1 = w1.ln();
            let in_s = basis.omega_jets(&w1, &log_w1, 3);
            // w^ρ = w₁^ρ · exp(ρ log(1 + s/w₁))
            let rho_c = BigComplex::from_rational(prec, rho);
            let one = BigComplex::from_f64(prec, 1.0, 0.0);
            let unit = &TruncatedSeries::constant(one, 3) + &TruncatedSeries::variable(&w1, 3).scale(&w1.recip());
            let mut exponent = unit.log().expect("unit constant term").scale(&rho_c);
            exponent.set_coeff(0, BigComplex::zero(prec));
            let power = exponent.exp().expect("zero constant term").scale(&(&rho_c * &log_w1).exp());
            // s(t) = w₁/(1 + w₁t) − w₁
            let mut s = TruncatedSeries::zero(&w1, 3);
            let mut c = w1.clone();
            for n in 1..=3 {
                c = -(&c * &w1);
                s.set_coeff(n, c.clone());
            }
            let jets: Vec<TruncatedSeries<BigComplex>> =
                in_s.iter().map(|y| (y * &power).compose(&s).expect("zero constant term")).collect();
            Ok(jets_to_state(&jets))
        }
    }
}

fn jets_to_state(jets: &[TruncatedSeries<BigComplex>]) -> Mat4<BigComplex> {
    Mat4::from_fn(|k, j| jets[j].coeff(k).clone())
}
