//! Scalar abstraction: all core math is generic over a floating-point type.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive, Zero};

use crate::error::Error;

/// Floating-point scalar for the core computations (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion of an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Complex number from two literals.
    fn clit(re: f64, im: f64) -> Complex<Self> {
        Complex::new(Self::lit(re), Self::lit(im))
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Scalars with a dense eigensolver/linear-solver backend.
///
/// The contracts (residual bounds, canonical ordering) live in
/// [`crate::linalg`]; this trait only dispatches to the backend for the
/// concrete scalar.
pub trait EigScalar: Real {
    /// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
    fn backend_eig(
        a: &ndarray::Array2<Complex<Self>>,
    ) -> Result<(Vec<Complex<Self>>, ndarray::Array2<Complex<Self>>), Error>;

    /// Eigenvalues only.
    fn backend_eigvals(a: &ndarray::Array2<Complex<Self>>) -> Result<Vec<Complex<Self>>, Error>;

    /// Eigenvalues and eigenvectors of a Hermitian matrix (ascending order).
    fn backend_eigh(
        a: &ndarray::Array2<Complex<Self>>,
    ) -> Result<(Vec<Self>, ndarray::Array2<Complex<Self>>), Error>;

    /// Solve `A x = b` by pivoted LU.
    fn backend_solve(
        a: &ndarray::Array2<Complex<Self>>,
        b: &[Complex<Self>],
    ) -> Result<Vec<Complex<Self>>, Error>;
}

macro_rules! impl_eig_scalar {
    ($re:ty) => {
        impl EigScalar for $re {
            fn backend_eig(
                a: &ndarray::Array2<Complex<Self>>,
            ) -> Result<(Vec<Complex<Self>>, ndarray::Array2<Complex<Self>>), Error> {
                let n = a.nrows();
                let m = faer::Mat::<Complex<Self>>::from_fn(n, n, |i, j| a[[i, j]]);
                let evd = m.eigen().map_err(|_| Error::EigConvergence { index: n })?;
                let s = evd.S();
                let u = evd.U();
                let values: Vec<Complex<Self>> = (0..n).map(|k| s[k]).collect();
                let vectors =
                    ndarray::Array2::from_shape_fn((n, n), |(i, k)| u[(i, k)]);
                Ok((values, vectors))
            }

            fn backend_eigvals(
                a: &ndarray::Array2<Complex<Self>>,
            ) -> Result<Vec<Complex<Self>>, Error> {
                let n = a.nrows();
                let m = faer::Mat::<Complex<Self>>::from_fn(n, n, |i, j| a[[i, j]]);
                m.eigenvalues()
                    .map_err(|_| Error::EigConvergence { index: n })
            }

            fn backend_eigh(
                a: &ndarray::Array2<Complex<Self>>,
            ) -> Result<(Vec<Self>, ndarray::Array2<Complex<Self>>), Error> {
                let n = a.nrows();
                let m = faer::Mat::<Complex<Self>>::from_fn(n, n, |i, j| a[[i, j]]);
                let evd = m
                    .self_adjoint_eigen(faer::Side::Lower)
                    .map_err(|_| Error::EigConvergence { index: n })?;
                let s = evd.S();
                let u = evd.U();
                let values: Vec<Self> = (0..n).map(|k| s[k].re).collect();
                let vectors =
                    ndarray::Array2::from_shape_fn((n, n), |(i, k)| u[(i, k)]);
                Ok((values, vectors))
            }

            fn backend_solve(
                a: &ndarray::Array2<Complex<Self>>,
                b: &[Complex<Self>],
            ) -> Result<Vec<Complex<Self>>, Error> {
                use faer::linalg::solvers::Solve;
                let n = a.nrows();
                let m = faer::Mat::<Complex<Self>>::from_fn(n, n, |i, j| a[[i, j]]);
                let lu = m.partial_piv_lu();
                let u = lu.U();
                let mut min_piv = Self::infinity();
                let mut max_piv = Self::zero();
                let mut pivot = 0usize;
                for i in 0..n {
                    let p = u[(i, i)].norm();
                    if p < min_piv {
                        min_piv = p;
                        pivot = i;
                    }
                    if p > max_piv {
                        max_piv = p;
                    }
                }
                let floor = max_piv * Self::epsilon() * Self::from_usize(n.max(4)).unwrap();
                if min_piv <= floor {
                    return Err(Error::SingularMatrix {
                        pivot,
                        magnitude: min_piv.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let rhs = faer::Mat::<Complex<Self>>::from_fn(n, 1, |i, _| b[i]);
                let x = lu.solve(&rhs);
                Ok((0..n).map(|i| x[(i, 0)]).collect())
            }
        }
    };
}

impl_eig_scalar!(f32);
impl_eig_scalar!(f64);
