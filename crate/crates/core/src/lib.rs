//! Hodge-theoretic data of maximally unipotent monodromy points of
//! fourth-order Picard–Fuchs operators.

pub mod bigcomplex;
pub mod continuation;
pub mod examples;
pub mod lmhs;
pub mod matrix;
pub mod picard_fuchs;
pub mod rational;
pub mod recognize;
pub mod scalar;
pub mod series;
pub mod symplectic;

pub use bigcomplex::BigComplex;
pub use matrix::{Mat4, Vec4};
pub use rational::Rational;
pub use scalar::{ComplexField, Field, Scalar};
pub use series::{SeriesError, TruncatedSeries};

/// Exact power series with rational coefficients.
pub type RationalSeries = TruncatedSeries<Rational>;
/// Numeric power series at a chosen working precision.
pub type ComplexSeries = TruncatedSeries<BigComplex>;
pub type RationalMatrix = Mat4<Rational>;
pub type ComplexMatrix = Mat4<BigComplex>;
