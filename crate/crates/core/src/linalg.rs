//! Dense complex linear algebra contracts: eigendecomposition, linear
//! solves, and numerical-range boundary computation.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::Error;
use crate::scalar::{EigScalar, Real};
use crate::Result;

/// Dimension cap for dense eigensolves.
pub const DENSE_EIG_CAP: usize = 3600;

/// Eigendecomposition with per-pair residuals, canonically ordered by
/// (real part, imaginary part).
#[derive(Debug, Clone)]
pub struct EigenResult<R: Real> {
    pub eigenvalues: Vec<Complex<R>>,
    /// Right eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: Array2<Complex<R>>,
    /// `||A v - lambda v||_2 / ||A||_inf` per pair (unit-norm `v`).
    pub residuals: Vec<R>,
}

fn max_row_sum<R: Real>(a: &Array2<Complex<R>>) -> R {
    let mut worst = R::zero();
    for row in a.rows() {
        let s = row.iter().map(|z| z.norm()).fold(R::zero(), |x, y| x + y);
        if s > worst {
            worst = s;
        }
    }
    worst
}

fn canonical_order<R: Real>(values: &[Complex<R>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a]
            .re
            .partial_cmp(&values[b].re)
            .unwrap()
            .then(values[a].im.partial_cmp(&values[b].im).unwrap())
    });
    idx
}

/// Dense eigendecomposition of a general complex matrix.
pub fn eig_dense<R: EigScalar>(a: &Array2<Complex<R>>) -> Result<EigenResult<R>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap {
            dim: n,
            cap: DENSE_EIG_CAP,
        });
    }
    let (values, vectors) = R::backend_eig(a)?;
    let order = canonical_order(&values);
    let eigenvalues: Vec<_> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[[i, col]] = vectors[[i, k]];
        }
    }
    let scale = max_row_sum(a).max(R::min_positive_value());
    let mut residuals = Vec::with_capacity(n);
    for col in 0..n {
        let lambda = eigenvalues[col];
        let mut num = R::zero();
        let mut vnorm = R::zero();
        for i in 0..n {
            let mut av = Complex::new(R::zero(), R::zero());
            for j in 0..n {
                av += a[[i, j]] * eigenvectors[[j, col]];
            }
            num += (av - lambda * eigenvectors[[i, col]]).norm_sqr();
            vnorm += eigenvectors[[i, col]].norm_sqr();
        }
        residuals.push((num.sqrt() / vnorm.sqrt().max(R::min_positive_value())) / scale);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Eigenvalues only, canonically ordered; cheaper than [`eig_dense`].
pub fn eigvals_dense<R: EigScalar>(a: &Array2<Complex<R>>) -> Result<Vec<Complex<R>>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap {
            dim: n,
            cap: DENSE_EIG_CAP,
        });
    }
    let values = R::backend_eigvals(a)?;
    let order = canonical_order(&values);
    Ok(order.into_iter().map(|k| values[k]).collect())
}

/// Hermitian eigendecomposition (ascending real eigenvalues).
pub fn eigh_dense<R: EigScalar>(a: &Array2<Complex<R>>) -> Result<(Vec<R>, Array2<Complex<R>>)> {
    let n = a.nrows();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap {
            dim: n,
            cap: DENSE_EIG_CAP,
        });
    }
    R::backend_eigh(a)
}

/// Solve `A x = b` with a pivoted dense factorization.
pub fn solve_linear<R: EigScalar>(
    a: &Array2<Complex<R>>,
    b: &[Complex<R>],
) -> Result<Vec<Complex<R>>> {
    let n = a.nrows();
    if n != a.ncols() || n != b.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    R::backend_solve(a, b)
}

/// Support points on the boundary of the numerical range by the
/// rotated-Hermitian-part method with `m` angles.
pub fn numerical_range_boundary<R: EigScalar>(
    a: &Array2<Complex<R>>,
    m: usize,
) -> Result<Vec<Complex<R>>> {
    let n = a.nrows();
    if m < 8 {
        return Err(Error::InvalidGrid {
            reason: format!("numerical range needs m >= 8 angles, got {m}"),
        });
    }
    let mut points = Vec::with_capacity(m);
    for k in 0..m {
        let phi = R::lit(2.0) * R::PI() * R::from_usize(k).unwrap() / R::from_usize(m).unwrap();
        let rot = Complex::new(phi.cos(), -phi.sin());
        // Hermitian part of e^{-i phi} A
        let mut h = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let z = rot * a[[i, j]] + (rot * a[[j, i]]).conj();
                h[[i, j]] = z.scale(R::lit(0.5));
            }
        }
        let (vals, vecs) = R::backend_eigh(&h)?;
        // eigenvector of the largest eigenvalue of the rotated Hermitian part
        let top = vals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let w: Vec<Complex<R>> = (0..n).map(|i| vecs[[i, top]]).collect();
        let mut num = Complex::new(R::zero(), R::zero());
        let mut den = R::zero();
        for i in 0..n {
            let mut aw = Complex::new(R::zero(), R::zero());
            for j in 0..n {
                aw += a[[i, j]] * w[j];
            }
            num += aw * w[i].conj();
            den += w[i].norm_sqr();
        }
        points.push(num.scale(den.recip()));
    }
    Ok(points)
}

/// Kronecker product of dense complex matrices.
pub fn kron<R: Real>(a: &Array2<Complex<R>>, b: &Array2<Complex<R>>) -> Array2<Complex<R>> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] = aij * b[[p, q]];
                }
            }
        }
    }
    out
}

/// Convex-hull membership test used by the spectrum-containment checks:
/// distance from `z` to the hull of `points` (zero if inside).
pub fn hull_distance<R: Real>(z: Complex<R>, points: &[Complex<R>]) -> R {
    // gift-wrap the (small) point set, then measure signed distances
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return hull
            .iter()
            .map(|p| (z - p).norm())
            .fold(R::infinity(), |a, b| a.min(b));
    }
    let mut inside = true;
    let mut dist = R::infinity();
    let k = hull.len();
    for i in 0..k {
        let p = hull[i];
        let q = hull[(i + 1) % k];
        let edge = q - p;
        let cross = edge.re * (z.im - p.im) - edge.im * (z.re - p.re);
        if cross < R::zero() {
            inside = false;
        }
        dist = dist.min(segment_distance(z, p, q));
    }
    if inside {
        R::zero()
    } else {
        dist
    }
}

fn segment_distance<R: Real>(z: Complex<R>, p: Complex<R>, q: Complex<R>) -> R {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == R::zero() {
        return (z - p).norm();
    }
    let t = ((z - p).re * d.re + (z - p).im * d.im) / len2;
    let t = t.max(R::zero()).min(R::one());
    (z - (p + d.scale(t))).norm()
}

fn convex_hull<R: Real>(points: &[Complex<R>]) -> Vec<Complex<R>> {
    let mut pts: Vec<Complex<R>> = points.to_vec();
    pts.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex<R>, a: Complex<R>, b: Complex<R>| {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut lower: Vec<Complex<R>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= R::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex<R>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= R::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use num_complex::Complex64;

    #[test]
    fn diagonal_eig() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(2.0, 1.0)]
        ];
        let r = eig_dense(&a).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - Complex64::new(2.0, 1.0)).norm() < 1e-14);
        assert!(r.residuals.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn jordan_block_eigenvalues() {
        let a = array![
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        ];
        let r = eig_dense(&a).unwrap();
        for v in &r.eigenvalues {
            assert!(v.norm() < 1e-7, "defective eigenvalue {v}");
        }
        assert!(r.residuals.iter().all(|&x| x < 1e-6));
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        // closed-form stencil spectrum oracle: 4/h^2 sin^2(k pi / (2(n+1)))
        let n = 100;
        let h = 0.1;
        let mut a = Array2::<Complex64>::zeros((n, n));
        for j in 0..n {
            a[[j, j]] = Complex64::new(2.0 / (h * h), 0.0);
            if j > 0 {
                a[[j, j - 1]] = Complex64::new(-1.0 / (h * h), 0.0);
            }
            if j + 1 < n {
                a[[j, j + 1]] = Complex64::new(-1.0 / (h * h), 0.0);
            }
        }
        let r = eig_dense(&a).unwrap();
        for (k, lam) in r.eigenvalues.iter().enumerate() {
            let exact = 4.0 / (h * h)
                * ((k + 1) as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0)))
                    .sin()
                    .powi(2);
            assert!(
                (lam.re - exact).abs() <= 1e-9 * exact.max(1.0),
                "k={k}: {} vs {exact}",
                lam.re
            );
            assert!(lam.im.abs() < 1e-9);
        }
    }

    #[test]
    fn hermitian_input_gives_real_eigenvalues() {
        let n = 40;
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(((i * 7 + j * 3) % 11) as f64, (i as f64 - j as f64) * 0.1);
                if i <= j {
                    a[[i, j]] = z;
                    a[[j, i]] = z.conj();
                }
            }
        }
        let r = eig_dense(&a).unwrap();
        for v in &r.eigenvalues {
            assert!(v.im.abs() < 1e-10 * (1.0 + v.re.abs()));
        }
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        ];
        let b = vec![Complex64::new(3.0, -1.0), Complex64::new(0.5, 2.0)];
        assert_eq!(solve_linear(&a, &b).unwrap(), b);
        let d = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(4.0, 0.0)]
        ];
        let rhs = vec![Complex64::new(2.0, 0.0), Complex64::new(8.0, 0.0)];
        let x = solve_linear(&d, &rhs).unwrap();
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((x[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_residual_on_random_matrix() {
        // residual substitution oracle on a seeded 50x50 instance
        use rand::prelude::*;
        use rand::rngs::StdRng;
        let mut rng = StdRng::seed_from_u64(7);
        let n = 50;
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            a[[i, i]] += Complex64::new(4.0, 0.0); // keep it well-conditioned
        }
        let b: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let x = solve_linear(&a, &b).unwrap();
        let mut rnorm = 0.0f64;
        let mut xnorm = 0.0f64;
        let mut bnorm = 0.0f64;
        for i in 0..n {
            let mut ax = Complex64::new(0.0, 0.0);
            for j in 0..n {
                ax += a[[i, j]] * x[j];
            }
            rnorm += (ax - b[i]).norm_sqr();
            xnorm += x[i].norm_sqr();
            bnorm += b[i].norm_sqr();
        }
        let scale = max_row_sum(&a) * xnorm.sqrt() + bnorm.sqrt();
        assert!(rnorm.sqrt() <= 1e-10 * scale);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            [Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)]
        ];
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        match solve_linear(&a, &b) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("expected singular-matrix error, got {other:?}"),
        }
    }

    #[test]
    fn numerical_range_of_identity_and_normal() {
        let id = array![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        ];
        for p in numerical_range_boundary(&id, 16).unwrap() {
            assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let d = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        ];
        for p in numerical_range_boundary(&d, 16).unwrap() {
            assert!(p.im.abs() < 1e-10);
            assert!(p.re > -1e-10 && p.re < 1.0 + 1e-10);
        }
    }

    #[test]
    fn shift_matrix_numerical_radius() {
        // classical result: W([[0,1],[0,0]]) is the closed disc of radius 1/2
        let a = array![
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        ];
        let pts = numerical_range_boundary(&a, 64).unwrap();
        let radius = pts.iter().map(|p| p.norm()).fold(0.0f64, f64::max);
        assert!((radius - 0.5).abs() < 1e-8, "numerical radius {radius}");
        // dense random sampling of <Ax, x> stays inside the disc
        use rand::prelude::*;
        use rand::rngs::StdRng;
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let x = [
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ];
            let n2 = x[0].norm_sqr() + x[1].norm_sqr();
            let v = (x[1] * x[0].conj()) / n2;
            assert!(v.norm() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn spectrum_inside_numerical_range_hull() {
        use rand::prelude::*;
        use rand::rngs::StdRng;
        let mut rng = StdRng::seed_from_u64(3);
        let n = 24;
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let pts = numerical_range_boundary(&a, 48).unwrap();
        let eig = eig_dense(&a).unwrap();
        for lam in &eig.eigenvalues {
            assert!(hull_distance(*lam, &pts) < 1e-6, "eigenvalue {lam} escapes hull");
        }
    }

    #[test]
    fn kron_small() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        ];
        let b = array![
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)]
        ];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 0]], Complex64::new(0.0, 1.0));
        assert_eq!(k[[1, 3]], Complex64::new(6.0, 0.0));
        assert_eq!(k[[2, 2]], Complex64::new(0.0, 1.0));
        assert_eq!(k[[3, 3]], Complex64::new(3.0, 0.0));
    }
}
