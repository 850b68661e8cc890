//! Numerical analytic continuation of solution frames, monodromy
//! representations and the comparison of two MUM points.
//!
//! A frame is an ordered quadruple of local solutions. A transport matrix
//! `T` expresses the continuation of a start frame `f` along a path in
//! terms of the end frame `g` as `f = T g` (column vectors of functions).
//! Consequently transports compose as `T_{γ₁γ₂} = T_{γ₁} T_{γ₂}`.

mod cross;
mod frames;
mod monodromy;
pub mod ode;
mod path;

use serde::Serialize;

use crate::bigcomplex::BigComplex;
use crate::lmhs::LmhsError;
use crate::matrix::Mat4;
use crate::picard_fuchs::PfError;
use crate::symplectic::SymplecticError;

pub use cross::{
    cross_mum_invariants, integral_frame, CrossMumOptions, CrossMumReport, FrameReport, FrameSource, LoopRecord, MumPointReport,
    DEFAULT_MAX_PRECISION, START_PRECISION,
};
pub use frames::{frame_jets, LocalFrame};
pub use monodromy::{
    automatic_loops, choose_base_point, default_log2_tolerance, global_monodromy, log2_global_residual, monodromy_representation, recognize_matrix, recognize_vector, transport,
    verify_unipotent_log, GlobalMonodromy, LoopMonodromy, LoopSpec, LoopSystem, RecognizedEntry, RecognizedMatrix, UnipotencyReport,
};
pub use path::PathSpec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContinuationError {
    #[error("path clearance violated: {0}")]
    Clearance(String),
    #[error("precision exhausted: {0}; rerun with more precision bits")]
    PrecisionExhausted(String),
    #[error("frame unavailable: {0}")]
    Frame(String),
    #[error("recognition failed: {0}")]
    Recognition(String),
    #[error("integral frame hypothesis violated: {0}")]
    FrameHypothesis(String),
    #[error(transparent)]
    PicardFuchs(#[from] PfError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Lmhs(#[from] LmhsError),
}

/// High-precision transport or monodromy matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMatrix {
    pub matrix: Mat4<BigComplex>,
    pub precision: u32,
    /// Heuristic bound on `log₂` of the entrywise absolute error.
    pub log2_error: f64,
}

impl TransportMatrix {
    pub fn identity(prec: u32) -> Self {
        TransportMatrix {
            matrix: Mat4::identity(&BigComplex::from_f64(prec, 1.0, 0.0)),
            precision: prec,
            log2_error: -(f64::from(prec)),
        }
    }

    /// `self · other` with errors added.
    pub fn compose(&self, other: &TransportMatrix) -> TransportMatrix {
        let scale = self.matrix.max_abs().max(other.matrix.max_abs()).max(1.0).log2();
        TransportMatrix {
            matrix: &self.matrix * &other.matrix,
            precision: self.precision.min(other.precision),
            log2_error: log2_sum(self.log2_error, other.log2_error) + scale + 2.0,
        }
    }

    /// `max |Tᵢⱼ − Iᵢⱼ|`.
    pub fn distance_to_identity(&self) -> f64 {
        let id = Mat4::identity(&BigComplex::from_f64(self.precision, 1.0, 0.0));
        (&self.matrix - &id).max_abs()
    }

    /// `log₂ max |Tᵢⱼ − Iᵢⱼ|` without underflow.
    pub fn log2_distance_to_identity(&self) -> f64 {
        let id = Mat4::identity(&BigComplex::from_f64(self.precision, 1.0, 0.0));
        use crate::scalar::ComplexField;
        (&self.matrix - &id).rows().iter().flatten().map(|x| x.log2_magnitude()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn render(&self, digits: usize) -> [[String; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.matrix.get(i, j).to_string_digits(digits)))
    }
}

pub(crate) fn log2_sum(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp2() + (b - m).exp2()).log2()
}

/// Serializable rendering of a transport matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRecord {
    pub entries: [[String; 4]; 4],
    pub precision: u32,
    pub log2_error: f64,
}

impl From<&TransportMatrix> for MatrixRecord {
    fn from(t: &TransportMatrix) -> Self {
        MatrixRecord { entries: t.render(20), precision: t.precision, log2_error: t.log2_error }
    }
}
