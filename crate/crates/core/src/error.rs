//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dilation parameter has a pole at theta = -1")]
    PoleAtMinusOne,

    #[error("theta = {re}+{im}i is neither in the region Gamma nor real >= 0")]
    InvalidTheta { re: f64, im: f64 },

    #[error("radial coordinate u = {u} is negative")]
    NegativeRadius { u: f64 },

    #[error("cutoff profile requires 0 < K < R, got K = {k}, R = {r}")]
    InvalidProfile { k: f64, r: f64 },

    #[error("|psi_theta'({u})| = {abs_dpsi:.3e} is numerically degenerate")]
    DegenerateJacobian { u: f64, abs_dpsi: f64 },

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("potential support end {support_end} exceeds the scaling radius K = {k}")]
    SupportViolation { support_end: f64, k: f64 },

    #[error("grid truncation u_max = {u_max} does not exceed the profile radius R = {r}")]
    GridProfileMismatch { u_max: f64, r: f64 },

    #[error("discrete dilation is defined only for real theta >= 0")]
    ComplexThetaUnsupported,

    #[error("construction needs u_max >= {needed}, grid provides {available}")]
    SupportOverflow { needed: f64, available: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {dim} exceeds the dense-solver cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("eigensolver failed to converge (index {index})")]
    EigConvergence { index: usize },

    #[error("matrix is numerically singular (pivot {pivot}, magnitude {magnitude:.3e})")]
    SingularMatrix { pivot: usize, magnitude: f64 },

    #[error("solve point is within {distance:.3e} of the computed spectrum (floor {floor:.3e})")]
    NearSingularSolve { distance: f64, floor: f64 },

    #[error("tail polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("vector is not an analytic vector: {reason}")]
    NonAnalyticVector { reason: String },
}
