//! Numerical laboratory for complex scaling (analytic dilation) of model
//! operators on manifolds with cylindrical ends and codimension-2 corners.
//!
//! The library builds finite-difference models of the dilated operators,
//! classifies their spectra into essential-spectrum rays and discrete
//! candidates, detects resonances by rotation-stability, and continues
//! resolvent matrix elements across the essential spectrum.
//!
//! Core math is generic over the floating-point scalar via [`Real`];
//! `f64` aliases are exported at the crate root.

pub mod analysis;
pub mod assembly;
pub mod continuation;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod scaling;
pub mod weyl;

pub use error::Error;
pub use scalar::{EigScalar, Real};

use num_complex::Complex;

/// Default scalar used by the CLI and the test suite.
pub type R64 = f64;
/// Complex number over the default scalar.
pub type C64 = Complex<f64>;
/// Dense complex matrix over the default scalar.
pub type CMat64 = ndarray::Array2<C64>;
/// Complex vector over the default scalar.
pub type CVec64 = ndarray::Array1<C64>;

/// Convenience result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
