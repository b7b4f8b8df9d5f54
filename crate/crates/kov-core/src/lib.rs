//! Exact-arithmetic engine for the matrix Painlevé–Kovalevskaya test.
//!
//! The crate analyses two-field quadratic matrix ODE systems
//!
//! ```text
//! u' = -u^2 + 2uv + alpha (uv - vu) - 2zu + b1 u + u b2 + b3 v + v b4 + b5
//! v' = -v^2 + 2vu + beta  (vu - uv) + 2zv + c1 v + v c2 + c3 u + u c4 + c5
//! ```
//!
//! by expanding formal Laurent solutions around a movable simple pole and
//! counting arbitrary constants. Everything is computed over the rationals
//! with arbitrary precision; there is no floating point anywhere.
//!
//! Module layout:
//! - [`param`], [`poly`]: parameter registry and sparse multivariate
//!   polynomials over Q with a distinguished Laurent variable `eps`.
//! - [`matrix`]: matrices with polynomial entries.
//! - [`linalg`]: exact rational linear algebra (RREF, kernels, parametric
//!   affine solves with obstruction extraction).
//! - [`model`]: the system data type, the residue catalog, mu/Delta algebra
//!   and the dihedral parameter symmetry.
//! - [`engine`]: the linearization operator, spectra, series expansion,
//!   resonances, maximality and residual verification.
//! - [`classify`]: the plane classification, the three deformation families,
//!   the second-order reduction and the degenerations to second-Painlevé-type
//!   systems.
//! - [`config`], [`report`], [`selftest`]: system config ingestion, JSON
//!   reports and the built-in verification suite.

pub mod param;
pub mod poly;
pub mod matrix;
pub mod linalg;
pub mod model;
pub mod engine;
pub mod classify;
pub mod config;
pub mod report;
pub mod selftest;
pub mod jets;

pub use param::{ParamId, ParamTable, EPS_ID};
pub use poly::{PolyQ, Rat};
pub use matrix::MatPoly;
pub use linalg::{AffineSolveResult, QMatrix};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KovError {
    #[error("substitution would create a negative exponent on non-Laurent variable `{var}`")]
    SubstitutionCreatesNegativePower { var: String },
    #[error("limit eps -> 0 diverges; surviving negative-degree terms: {terms}")]
    DivergentLimit { terms: String },
    #[error("evaluation requires division by zero (negative power of a vanishing value)")]
    EvalDivisionByZero,
    #[error("missing value for parameter `{0}` during evaluation")]
    MissingParamValue(String),
    #[error("block sizes {0:?} do not form a valid partition")]
    BadPartition(Vec<usize>),
    #[error("no non-commuting residues exist at (alpha, beta) = ({0}, {1})")]
    NotInSigma0(String, String),
    #[error("Delta(alpha, beta) = 0; mu-values are undefined")]
    DeltaZero,
    #[error("residue pair does not satisfy the residue equations for this system")]
    ResidueMismatch,
    #[error("matrix coefficient constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("could not sample an invertible matrix after {0} attempts")]
    SingularSample(usize),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, KovError>;
