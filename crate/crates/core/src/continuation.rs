//! Analytic vectors with closed-form inverse-power tails, their dilation
//! at complex parameters, resolvent matrix elements, and continuation
//! scans across the essential spectrum.

use num_complex::Complex;

use crate::assembly::{discrete_dilation, ModeOperator, OperatorKind};
use crate::error::Error;
use crate::geometry::HalfLineGrid;
use crate::linalg::eigvals_dense;
use crate::scalar::{EigScalar, Real};
use crate::scaling::{psi_jet, smoothstep_jet, CutoffProfile, DilationParameter};
use crate::Result;

/// Cap on the degree of the tail polynomials (in 1/u).
pub const TAIL_DEGREE_CAP: usize = 6;

/// Default floor on the distance from a solve point to the computed spectrum.
pub const DISTANCE_FLOOR: f64 = 1e-3;

/// Interior-plus-tail data of one transverse mode.
#[derive(Debug, Clone)]
pub struct ModeComponent<R: Real> {
    /// Grid samples supported in `[0, K-1]`.
    pub interior: Vec<Complex<R>>,
    /// Coefficients of the tail polynomial `p(x) = sum c_j x^j` in `x = 1/u`,
    /// attached with the `1/u^2` prefactor.
    pub tail: Vec<Complex<R>>,
}

/// A vector of the dilation-analytic class: compactly supported interior
/// plus closed-form inverse-power tails per mode, unit discrete norm.
#[derive(Debug, Clone)]
pub struct AnalyticVector<R: Real> {
    components: Vec<ModeComponent<R>>,
    grid: HalfLineGrid<R>,
    profile: CutoffProfile<R>,
}

/// Tail transition cutoff: ramps from 0 to 1 over `[K-1, K]`, so the
/// closed-form tail only matters where the scaling map is still explicit.
pub fn kappa<R: Real>(profile: &CutoffProfile<R>, u: R) -> R {
    let k = profile.inner_radius();
    smoothstep_jet(u - (k - R::one()))[0]
}

fn tail_value<R: Real>(coeffs: &[Complex<R>], z: Complex<R>) -> Complex<R> {
    // (1/z^2) * p(1/z), evaluated by Horner in 1/z
    let inv = z.finv();
    let mut acc = Complex::new(R::zero(), R::zero());
    for c in coeffs.iter().rev() {
        acc = acc * inv + c;
    }
    acc * inv * inv
}

impl<R: Real> AnalyticVector<R> {
    pub fn grid(&self) -> &HalfLineGrid<R> {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.components.len()
    }

    /// Reconstruct the mode component on the grid: `(1-kappa) g + kappa h`.
    pub fn reconstruct(&self, mode: usize) -> Vec<Complex<R>> {
        let comp = &self.components[mode];
        self.grid
            .nodes()
            .enumerate()
            .map(|(j, u)| {
                let k = kappa(&self.profile, u);
                let mut val = comp.interior[j].scale(R::one() - k);
                if k > R::zero() && !comp.tail.is_empty() {
                    val += tail_value(&comp.tail, Complex::new(u, R::zero())).scale(k);
                }
                val
            })
            .collect()
    }

    /// Dilate the mode component at a (possibly complex) parameter:
    /// the interior part is untouched, the tail is evaluated in closed
    /// form at the complex-scaled argument with the Jacobian half-power.
    pub fn dilate(&self, param: &DilationParameter<R>, mode: usize) -> Result<Vec<Complex<R>>> {
        let comp = &self.components[mode];
        let mut out = Vec::with_capacity(self.grid.len());
        for (j, u) in self.grid.nodes().enumerate() {
            let k = kappa(&self.profile, u);
            let mut val = comp.interior[j].scale(R::one() - k);
            if k > R::zero() && !comp.tail.is_empty() {
                let jet = psi_jet(&self.profile, param.theta(), u)?;
                let half = jet.dpsi.sqrt();
                val += tail_value(&comp.tail, jet.psi) * half.scale(k);
            }
            out.push(val);
        }
        Ok(out)
    }

    /// Norm of the full vector across modes in the discrete L^2 norm.
    pub fn norm(&self) -> R {
        let mut s = R::zero();
        for mode in 0..self.modes() {
            for z in self.reconstruct(mode) {
                s += z.norm_sqr();
            }
        }
        (s * self.grid.spacing()).sqrt()
    }
}

/// Build and normalize an analytic vector from per-mode data.
pub fn make_analytic_vector<R: Real>(
    profile: &CutoffProfile<R>,
    grid: &HalfLineGrid<R>,
    components: Vec<ModeComponent<R>>,
) -> Result<AnalyticVector<R>> {
    if components.is_empty() {
        return Err(Error::NonAnalyticVector {
            reason: "no mode components".into(),
        });
    }
    let support_cap = profile.inner_radius() - R::one();
    for comp in &components {
        if comp.interior.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: comp.interior.len(),
            });
        }
        if comp.tail.len() > TAIL_DEGREE_CAP + 1 {
            return Err(Error::DegreeCap {
                degree: comp.tail.len() - 1,
                cap: TAIL_DEGREE_CAP,
            });
        }
        for (j, u) in grid.nodes().enumerate() {
            if u >= support_cap && comp.interior[j].norm() > R::zero() {
                return Err(Error::NonAnalyticVector {
                    reason: format!(
                        "interior sample at u = {} is beyond the support cap",
                        u.to_f64().unwrap_or(f64::NAN)
                    ),
                });
            }
        }
    }
    let mut vector = AnalyticVector {
        components,
        grid: *grid,
        profile: *profile,
    };
    let norm = vector.norm();
    if norm == R::zero() {
        return Err(Error::NonAnalyticVector {
            reason: "zero vector".into(),
        });
    }
    for comp in &mut vector.components {
        for z in &mut comp.interior {
            *z = z.scale(norm.recip());
        }
        for z in &mut comp.tail {
            *z = z.scale(norm.recip());
        }
    }
    Ok(vector)
}

fn check_mode_ops<R: Real>(ops: &[ModeOperator<R>], f: &AnalyticVector<R>) -> Result<()> {
    if ops.len() != f.modes() {
        return Err(Error::DimensionMismatch {
            expected: f.modes(),
            got: ops.len(),
        });
    }
    for op in ops {
        if op.kind != OperatorKind::Cylinder {
            return Err(Error::InvalidGrid {
                reason: "matrix elements are defined against cylinder mode blocks".into(),
            });
        }
        if op.grid().len() != f.grid().len() {
            return Err(Error::DimensionMismatch {
                expected: f.grid().len(),
                got: op.grid().len(),
            });
        }
    }
    Ok(())
}

/// Resolvent matrix element `< (A(theta) - lambda)^{-1} U_theta f, U_theta g >`
/// summed over the mode blocks; conjugate-linear in `g`.
///
/// The second slot is dilated at the conjugated parameter, so that the
/// pairing (conjugate-linear in `g`) is holomorphic in `theta` and the
/// continuation is independent of the rotation wherever both sides exist.
/// For real `theta` this is the plain unitarity identity.
///
/// The solve is refused when the inverse-power estimate of the distance to
/// the spectrum, `||rhs|| / ||x||`, falls below `floor`.
pub fn matrix_element<R: Real>(
    lambda: Complex<R>,
    theta: &DilationParameter<R>,
    f: &AnalyticVector<R>,
    g: &AnalyticVector<R>,
    ops: &[ModeOperator<R>],
    floor: R,
) -> Result<Complex<R>> {
    check_mode_ops(ops, f)?;
    check_mode_ops(ops, g)?;
    let conj_theta = DilationParameter::new(theta.theta().conj())?;
    let h = f.grid().spacing();
    let mut acc = Complex::new(R::zero(), R::zero());
    for (mode, op) in ops.iter().enumerate() {
        let rhs = f.dilate(theta, mode)?;
        let x = op.shifted_tridiag_solve(lambda, &rhs)?;
        let rhs_norm = (rhs.iter().map(|z| z.norm_sqr()).fold(R::zero(), |a, b| a + b)).sqrt();
        let x_norm = (x.iter().map(|z| z.norm_sqr()).fold(R::zero(), |a, b| a + b)).sqrt();
        if rhs_norm > R::zero() {
            let dist_estimate = rhs_norm / x_norm.max(R::min_positive_value());
            if dist_estimate < floor {
                return Err(Error::NearSingularSolve {
                    distance: dist_estimate.to_f64().unwrap_or(f64::NAN),
                    floor: floor.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let gg = g.dilate(&conj_theta, mode)?;
        let mut inner = Complex::new(R::zero(), R::zero());
        for (xi, gi) in x.iter().zip(&gg) {
            inner += xi * gi.conj();
        }
        acc += inner.scale(h);
    }
    Ok(acc)
}

/// Per-point disposition along a continuation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFlag {
    Ok,
    /// Within the distance floor of the computed spectrum; not solved.
    NearSpectrum,
    /// Solve refused by the growth proxy.
    SolveRefused,
}

/// Trace of resolvent matrix elements along a path in the spectral plane.
#[derive(Debug, Clone)]
pub struct ContinuationTrace<R: Real> {
    pub lambdas: Vec<Complex<R>>,
    pub values: Vec<Complex<R>>,
    pub flags: Vec<PointFlag>,
    /// Max centered second difference over max |value| on clean points.
    pub smoothness: R,
    /// Indices of spike points aligned with a computed eigenvalue.
    pub pole_candidates: Vec<usize>,
}

/// Scan matrix elements along a path, flagging points that come too close
/// to the computed spectrum of the mode blocks.
pub fn continuation_scan<R: EigScalar>(
    path: &[Complex<R>],
    theta: &DilationParameter<R>,
    f: &AnalyticVector<R>,
    g: &AnalyticVector<R>,
    ops: &[ModeOperator<R>],
    floor: R,
) -> Result<ContinuationTrace<R>> {
    check_mode_ops(ops, f)?;
    let mut spectrum: Vec<Complex<R>> = Vec::new();
    for op in ops {
        spectrum.extend(eigvals_dense(&op.to_dense()?)?);
    }
    let mut values = Vec::with_capacity(path.len());
    let mut flags = Vec::with_capacity(path.len());
    for &lambda in path {
        let dist = spectrum
            .iter()
            .map(|s| (s - lambda).norm())
            .fold(R::infinity(), |a, b| a.min(b));
        if dist < floor {
            values.push(Complex::new(R::zero(), R::zero()));
            flags.push(PointFlag::NearSpectrum);
            continue;
        }
        match matrix_element(lambda, theta, f, g, ops, floor) {
            Ok(v) => {
                values.push(v);
                flags.push(PointFlag::Ok);
            }
            Err(Error::NearSingularSolve { .. }) => {
                values.push(Complex::new(R::zero(), R::zero()));
                flags.push(PointFlag::SolveRefused);
            }
            Err(e) => return Err(e),
        }
    }
    // smoothness: centered second differences over interior clean triples
    let mut max_dd = R::zero();
    let mut max_val = R::zero();
    for i in 0..path.len() {
        if flags[i] == PointFlag::Ok {
            max_val = max_val.max(values[i].norm());
        }
    }
    for i in 1..path.len().saturating_sub(1) {
        if flags[i - 1] == PointFlag::Ok && flags[i] == PointFlag::Ok && flags[i + 1] == PointFlag::Ok {
            let dd = (values[i + 1] - values[i].scale(R::lit(2.0)) + values[i - 1]).norm();
            max_dd = max_dd.max(dd);
        }
    }
    let smoothness = max_dd / max_val.max(R::min_positive_value());
    // spikes aligned with the computed discrete spectrum
    let mut pole_candidates = Vec::new();
    let mut mags: Vec<R> = values
        .iter()
        .zip(&flags)
        .filter(|(_, fl)| **fl == PointFlag::Ok)
        .map(|(v, _)| v.norm())
        .collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !mags.is_empty() {
        let median = mags[mags.len() / 2];
        for i in 0..path.len() {
            let spike = match flags[i] {
                PointFlag::Ok => values[i].norm() > R::lit(10.0) * median.max(R::min_positive_value()),
                // refused points sit essentially on top of an eigenvalue
                PointFlag::NearSpectrum | PointFlag::SolveRefused => true,
            };
            if spike {
                let near = spectrum
                    .iter()
                    .map(|s| (s - path[i]).norm())
                    .fold(R::infinity(), |a, b| a.min(b));
                if near < R::lit(50.0) * floor {
                    pole_candidates.push(i);
                }
            }
        }
    }
    Ok(ContinuationTrace {
        lambdas: path.to_vec(),
        values,
        flags,
        smoothness,
        pole_candidates,
    })
}

/// Cross-check of the closed-form dilation against the discrete dilation
/// operator at a real parameter; returns the worst relative gap.
pub fn real_dilation_gap<R: Real>(
    f: &AnalyticVector<R>,
    profile: &CutoffProfile<R>,
    theta: R,
) -> Result<R> {
    let param = DilationParameter::real(theta)?;
    let mut worst = R::zero();
    for mode in 0..f.modes() {
        let closed = f.dilate(&param, mode)?;
        let rec = f.reconstruct(mode);
        let disc = discrete_dilation(profile, &param, &rec, f.grid())?;
        let mut err = R::zero();
        let mut scale = R::zero();
        for (a, b) in closed.iter().zip(&disc) {
            err = err.max((a - b).norm());
            scale = scale.max(a.norm());
        }
        // ignore the zero-extension horizon: the closed form keeps the tail
        // that the discrete operator truncates
        let horizon = f.grid().u_max() / (R::one() + theta);
        let mut err_inside = R::zero();
        for (j, u) in f.grid().nodes().enumerate() {
            if u < horizon - R::lit(2.0) * f.grid().spacing() {
                err_inside = err_inside.max((closed[j] - disc[j]).norm());
            }
        }
        worst = worst.max(err_inside / scale.max(R::min_positive_value()));
        let _ = err;
    }
    Ok(worst)
}
