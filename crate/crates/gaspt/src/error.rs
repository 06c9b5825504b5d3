//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("disk center must satisfy a > 1 (got a = {a})")]
    InvalidCenter { a: f64 },

    #[error("point {z} is not strictly inside the disk (distance to boundary < {tol})")]
    NotInterior { z: Complex64, tol: f64 },

    #[error("evaluation point {k} lies on the branch cut of sqrt((k - z)(k + conj(z))) for z = {z}")]
    OnBranchCut { z: Complex64, k: Complex64 },

    #[error("branch cut crossing is ambiguous near k = {k} (within tolerance {tol})")]
    AmbiguousCrossing { k: Complex64, tol: f64 },

    #[error("evaluation too close to a pole or branch point: |{k} - {singular}| < {tol}")]
    NearSingularity {
        k: Complex64,
        singular: Complex64,
        tol: f64,
    },

    #[error("samples must lie on a uniform theta grid")]
    NonUniformGrid,

    #[error("need at least {needed} samples for order {order}, got {got}")]
    TooFewSamples { needed: usize, order: usize, got: usize },

    #[error("series must have zero mean (got |c_0| = {mean})")]
    NonzeroMean { mean: f64 },

    #[error("series must be real-valued (conjugate symmetry violated by {deviation})")]
    NonRealSeries { deviation: f64 },

    #[error("point k = {k} is outside the admissible region: {what}")]
    BadSpectralPoint { k: Complex64, what: &'static str },

    #[error("NaN produced at quadrature node {index}")]
    NanAtNode { index: usize },

    #[error("missing Dirichlet trace: supply the trace series or an anchor value")]
    MissingTrace,

    #[error("operation requires alpha = {expected}, data has alpha = {got}")]
    AlphaMismatch { expected: i32, got: i32 },

    #[error("exact solution is identically zero after the map")]
    DegenerateSolution,

    #[error("kind of exact solution does not support this operation")]
    UnsupportedKind,

    #[error("iteration failed to converge: {what} (residual {residual:.3e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("boundary data are inconsistent with the global relation (residual norm {residual:.3e})")]
    InconsistentData { residual: f64 },

    #[error("unsupported mode: {0}")]
    Unsupported(String),
}
