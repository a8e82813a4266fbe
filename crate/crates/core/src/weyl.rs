//! Boundary Weyl sequences: escaping wave packets whose defect norms
//! certify membership of a point in the essential spectrum, plus the
//! commutator smallness estimate behind the Weyl criterion.

use num_complex::Complex;

use crate::analysis::ray_distance;
use crate::assembly::{ModeOperator, OperatorKind};
use crate::error::Error;
use crate::scalar::Real;
use crate::scaling::{bump, plateau, DilationParameter};
use crate::Result;

/// Escape schedule of the wave packets: the packet of index `n` is
/// centered at `n^2 + 2n` with support radius `n`.
pub fn escape_center<R: Real>(n: usize) -> R {
    let n = R::from_usize(n).unwrap();
    n * n + R::lit(2.0) * n
}

/// What the singular sequence targets.
#[derive(Debug, Clone)]
pub enum BwsTarget<R: Real> {
    /// Escaping packet for one cylinder mode block.
    Free { mu: R },
    /// Product of two escaping packets for a corner mode block.
    Corner { mu: R },
    /// Plateau-truncated end eigenvector tensor an escaping packet.
    Channel {
        gamma: Complex<R>,
        end_vector: Vec<Complex<R>>,
    },
}

/// Specification of one boundary Weyl sequence element.
#[derive(Debug, Clone)]
pub struct SingularSequenceSpec<R: Real> {
    pub target: BwsTarget<R>,
    /// Sequence index; support escapes like `n^2`.
    pub index: usize,
    /// Spectral target; must lie on the predicted ray of the target.
    pub lambda: Complex<R>,
    pub theta: DilationParameter<R>,
}

/// Tolerance for the on-ray requirement of the target value.
const ON_RAY_TOL: f64 = 1e-12;

fn principal_wavenumber<R: Real>(
    lambda: Complex<R>,
    origin: Complex<R>,
    direction: Complex<R>,
) -> Result<Complex<R>> {
    let d = ray_distance(lambda, origin, direction);
    if d > R::lit(ON_RAY_TOL) * (R::one() + lambda.norm()) {
        return Err(Error::InvalidGrid {
            reason: format!(
                "bws target must lie on its ray (distance {})",
                d.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    Ok(((lambda - origin) / direction).sqrt())
}

fn packet<R: Real>(n: usize, k: Complex<R>, u: R) -> Complex<R> {
    let nr = R::from_usize(n).unwrap();
    let c = escape_center::<R>(n);
    let envelope = bump((u - c) / nr);
    if envelope == R::zero() {
        return Complex::new(R::zero(), R::zero());
    }
    // e^{i k u} with complex k (real for on-ray targets)
    let phase = (Complex::<R>::i() * k.scale(u)).exp();
    phase.scale(envelope / nr.sqrt())
}

/// Build the requested boundary Weyl sequence element on the operator's
/// grid, normalized to unit discrete norm.
pub fn build_bws<R: Real>(spec: &SingularSequenceSpec<R>, op: &ModeOperator<R>) -> Result<Vec<Complex<R>>> {
    if spec.index == 0 {
        return Err(Error::InvalidGrid {
            reason: "bws index must be >= 1".into(),
        });
    }
    let n = spec.index;
    let reach = escape_center::<R>(n) + R::from_usize(n).unwrap() + R::lit(2.0);
    let direction = spec.theta.theta_prime();
    let check_reach = |u_max: R| -> Result<()> {
        if u_max < reach {
            return Err(Error::SupportOverflow {
                needed: reach.to_f64().unwrap_or(f64::NAN),
                available: u_max.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    };
    let mut g = match (&spec.target, op.kind) {
        (BwsTarget::Free { mu }, OperatorKind::Cylinder) => {
            check_reach(op.grid().u_max())?;
            let k = principal_wavenumber(spec.lambda, Complex::new(*mu, R::zero()), direction)?;
            op.grid().nodes().map(|u| packet(n, k, u)).collect::<Vec<_>>()
        }
        (BwsTarget::Corner { mu }, OperatorKind::Corner) => {
            check_reach(op.grid().u_max())?;
            let g2 = op.grid2().expect("corner operator has two grids");
            check_reach(g2.u_max())?;
            // first factor targets 0, second targets lambda - mu
            let k1 = Complex::new(R::zero(), R::zero());
            let k2 = principal_wavenumber(spec.lambda, Complex::new(*mu, R::zero()), direction)?;
            let p: Vec<Complex<R>> = op.grid().nodes().map(|u| packet(n, k1, u)).collect();
            let q: Vec<Complex<R>> = g2.nodes().map(|u| packet(n, k2, u)).collect();
            let n2 = g2.len();
            let mut out = vec![Complex::new(R::zero(), R::zero()); p.len() * n2];
            for (i, pi) in p.iter().enumerate() {
                for (j, qj) in q.iter().enumerate() {
                    out[i * n2 + j] = pi * qj;
                }
            }
            out
        }
        (BwsTarget::Channel { gamma, end_vector }, OperatorKind::Channel) => {
            check_reach(op.grid().u_max())?;
            let g2 = op.grid2().expect("channel operator has two grids");
            if end_vector.len() != g2.len() {
                return Err(Error::DimensionMismatch {
                    expected: g2.len(),
                    got: end_vector.len(),
                });
            }
            let k = principal_wavenumber(spec.lambda, *gamma, direction)?;
            let f: Vec<Complex<R>> = op.grid().nodes().map(|u| packet(n, k, u)).collect();
            let nr = R::from_usize(n).unwrap();
            let trunc: Vec<Complex<R>> = g2
                .nodes()
                .zip(end_vector)
                .map(|(u, w)| w.scale(plateau(u / nr)))
                .collect();
            let n2 = g2.len();
            let mut out = vec![Complex::new(R::zero(), R::zero()); f.len() * n2];
            for (i, fi) in f.iter().enumerate() {
                for (j, tj) in trunc.iter().enumerate() {
                    out[i * n2 + j] = fi * tj;
                }
            }
            out
        }
        _ => {
            return Err(Error::InvalidGrid {
                reason: "bws target kind does not match the operator kind".into(),
            })
        }
    };
    let norm = op.norm(&g);
    if norm == R::zero() {
        return Err(Error::SupportOverflow {
            needed: reach.to_f64().unwrap_or(f64::NAN),
            available: 0.0,
        });
    }
    for z in &mut g {
        *z = z.scale(norm.recip());
    }
    Ok(g)
}

/// Defect norm `||(A - lambda) g||` in the discrete L^2 norm.
pub fn defect_norm<R: Real>(
    g: &[Complex<R>],
    lambda: Complex<R>,
    op: &ModeOperator<R>,
) -> Result<R> {
    let ag = op.apply(g)?;
    let mut s = R::zero();
    for (a, x) in ag.iter().zip(g) {
        s += (a - lambda * x).norm_sqr();
    }
    Ok((s * op.cell_measure()).sqrt())
}

/// Fraction of the squared mass of `g` on nodes with `u <= cut` (first
/// axis for 2D blocks); the escape property sends this to zero.
pub fn mass_below<R: Real>(g: &[Complex<R>], op: &ModeOperator<R>, cut: R) -> R {
    let mut below = R::zero();
    let mut total = R::zero();
    match op.grid2() {
        None => {
            for (j, z) in g.iter().enumerate() {
                let m = z.norm_sqr();
                total += m;
                if op.grid().node(j) <= cut {
                    below += m;
                }
            }
        }
        Some(g2) => {
            let n2 = g2.len();
            for (idx, z) in g.iter().enumerate() {
                let m = z.norm_sqr();
                total += m;
                if op.grid().node(idx / n2) <= cut {
                    below += m;
                }
            }
        }
    }
    below / total.max(R::min_positive_value())
}

/// Commutator battery: products of Gaussians living at the scale of the
/// plateau transition region.
fn commutator_battery<R: Real>(d: usize, op: &ModeOperator<R>) -> Vec<Vec<Complex<R>>> {
    let dr = R::from_usize(d).unwrap();
    let member_1d = |grid: &crate::geometry::HalfLineGrid<R>, c: R, w: R, k: R| -> Vec<Complex<R>> {
        grid.nodes()
            .map(|u| {
                let arg = (u - c * dr) / (w * dr);
                Complex::new((-arg * arg).exp() * (k * u).cos(), R::zero())
            })
            .collect()
    };
    let shapes: [(f64, f64, f64); 3] = [(1.5, 0.5, 0.0), (1.2, 0.4, 1.0), (0.8, 0.5, 0.5)];
    match op.grid2() {
        None => shapes
            .iter()
            .map(|&(c, w, k)| member_1d(op.grid(), R::lit(c), R::lit(w), R::lit(k)))
            .collect(),
        Some(g2) => {
            let n2 = g2.len();
            let mut members = Vec::new();
            for (s1, s2) in [(0usize, 0usize), (1, 2), (2, 1)] {
                let (c1, w1, k1) = shapes[s1];
                let (c2, w2, k2) = shapes[s2];
                let a = member_1d(op.grid(), R::lit(c1), R::lit(w1), R::lit(k1));
                let b = member_1d(g2, R::lit(c2), R::lit(w2), R::lit(k2));
                let mut f = vec![Complex::new(R::zero(), R::zero()); a.len() * n2];
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        f[i * n2 + j] = ai * bj;
                    }
                }
                members.push(f);
            }
            members
        }
    }
}

/// Multiply a grid function pointwise by the plateau cutoff at scale `d`
/// (product cutoff `eta_d(u1) eta_d(u2)` on 2D blocks).
fn apply_plateau<R: Real>(g: &[Complex<R>], op: &ModeOperator<R>, d: usize) -> Vec<Complex<R>> {
    let dr = R::from_usize(d).unwrap();
    match op.grid2() {
        None => g
            .iter()
            .enumerate()
            .map(|(j, z)| z.scale(plateau(op.grid().node(j) / dr)))
            .collect(),
        Some(g2) => {
            let n2 = g2.len();
            g.iter()
                .enumerate()
                .map(|(idx, z)| {
                    let e1 = plateau(op.grid().node(idx / n2) / dr);
                    let e2 = plateau(g2.node(idx % n2) / dr);
                    z.scale(e1 * e2)
                })
                .collect()
        }
    }
}

/// Commutator smallness: for each `(d, A_d)` pair, the worst ratio
/// `||[A, eta^(d)] f|| / (||A f|| + ||f||)` over the test battery.
pub fn commutator_decay<R: Real>(ops: &[(usize, ModeOperator<R>)]) -> Result<Vec<(usize, R)>> {
    let mut out = Vec::with_capacity(ops.len());
    for (d, op) in ops {
        let mut worst = R::zero();
        for mut f in commutator_battery(*d, op) {
            let norm = op.norm(&f);
            for z in &mut f {
                *z = z.scale(norm.recip());
            }
            let af = op.apply(&f)?;
            let eta_f = apply_plateau(&f, op, *d);
            let a_eta_f = op.apply(&eta_f)?;
            let eta_af = apply_plateau(&af, op, *d);
            let mut comm = R::zero();
            for (x, y) in a_eta_f.iter().zip(&eta_af) {
                comm += (x - y).norm_sqr();
            }
            let comm = (comm * op.cell_measure()).sqrt();
            let ratio = comm / (op.norm(&af) + R::one());
            if ratio > worst {
                worst = ratio;
            }
        }
        out.push((*d, worst));
    }
    Ok(out)
}

/// Least-squares slope of `log(value)` against `log(x)`.
pub fn log_log_slope<R: Real>(points: &[(usize, R)]) -> R {
    let n = R::from_usize(points.len()).unwrap();
    let mut sx = R::zero();
    let mut sy = R::zero();
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for (x, y) in points {
        let lx = R::from_usize(*x).unwrap().ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_channel_mode, assemble_cyl_mode};
    use crate::geometry::{gaussian_well, make_grid, BoundaryCondition::*, PotentialProfile};
    use crate::linalg::eig_dense;
    use crate::scaling::CutoffProfile;
    use num_complex::Complex64;

    fn theta() -> DilationParameter<f64> {
        DilationParameter::new(Complex64::new(0.4, 0.2)).unwrap()
    }

    fn free_op_for(n: usize, h: f64, mu: f64) -> ModeOperator<f64> {
        let pr = CutoffProfile::default();
        let u_max = escape_center::<f64>(n) + n as f64 + 8.0;
        let pts = (u_max / h).round() as usize - 1;
        let grid = make_grid(u_max, pts, Dirichlet).unwrap();
        assemble_cyl_mode(&pr, &theta(), mu, &grid, &PotentialProfile::zero()).unwrap()
    }

    #[test]
    fn free_bws_ray_origin_is_pure_bump() {
        let op = free_op_for(4, 0.5, 1.0);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: 1.0 },
            index: 4,
            lambda: Complex64::new(1.0, 0.0),
            theta: theta(),
        };
        let g = build_bws(&spec, &op).unwrap();
        assert!((op.norm(&g) - 1.0).abs() < 1e-12);
        // k = 0: no oscillation, so the phase is constant where nonzero
        let nonzero: Vec<&Complex64> = g.iter().filter(|z| z.norm() > 1e-14).collect();
        assert!(!nonzero.is_empty());
        for z in &nonzero {
            assert!(z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn free_bws_oscillates_at_forced_wavenumber() {
        let op = free_op_for(4, 0.5, 1.0);
        let lambda = Complex64::new(1.0, 0.0) + theta().theta_prime() * 4.0;
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: 1.0 },
            index: 4,
            lambda,
            theta: theta(),
        };
        let g = build_bws(&spec, &op).unwrap();
        // (lambda - mu)/theta' = 4 forces k = 2
        let c = escape_center::<f64>(4);
        let h = op.grid().spacing();
        let j = (c / h).round() as usize - 1;
        let ratio = g[j + 1] / g[j];
        let expect = (Complex64::i() * 2.0 * h).exp();
        assert!((ratio - expect).norm() < 1e-2, "ratio {ratio}, expect {expect}");
    }

    #[test]
    fn bws_requires_room() {
        let op = free_op_for(4, 0.5, 0.0);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: 0.0 },
            index: 16,
            lambda: Complex64::new(0.0, 0.0),
            theta: theta(),
        };
        assert!(matches!(build_bws(&spec, &op), Err(Error::SupportOverflow { .. })));
    }

    #[test]
    fn off_ray_target_is_rejected() {
        let op = free_op_for(4, 0.5, 0.0);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: 0.0 },
            index: 4,
            lambda: Complex64::new(1.0, 1.0),
            theta: theta(),
        };
        assert!(build_bws(&spec, &op).is_err());
    }

    #[test]
    fn defect_of_exact_eigenvector_is_solver_residual() {
        let pr = CutoffProfile::default();
        let grid = make_grid(14.0, 120, Neumann).unwrap();
        let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
        let op = assemble_cyl_mode(&pr, &theta(), 0.0, &grid, &v).unwrap();
        let r = eig_dense(&op.to_dense().unwrap()).unwrap();
        // bound state: eigenvalue closest to -3.6
        let (idx, lam) = r
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - Complex64::new(-3.6, 0.0))
                    .norm()
                    .partial_cmp(&(b.1 - Complex64::new(-3.6, 0.0)).norm())
                    .unwrap()
            })
            .map(|(i, l)| (i, *l))
            .unwrap();
        let v: Vec<Complex64> = (0..grid.len()).map(|i| r.eigenvectors[[i, idx]]).collect();
        let norm = op.norm(&v);
        let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        let d = defect_norm(&v, lam, &op).unwrap();
        assert!(d < 1e-8, "defect {d}");
    }

    #[test]
    fn free_defect_decays_and_escapes() {
        let mut pts = Vec::new();
        for n in [4usize, 8, 16] {
            let op = free_op_for(n, 0.5, 0.0);
            let lambda = theta().theta_prime() * 1.0;
            let spec = SingularSequenceSpec {
                target: BwsTarget::Free { mu: 0.0 },
                index: n,
                lambda,
                theta: theta(),
            };
            let g = build_bws(&spec, &op).unwrap();
            pts.push((n, defect_norm(&g, lambda, &op).unwrap()));
            // escape: mass below any fixed cut vanishes for large n
            assert!(mass_below(&g, &op, 10.0) < 1e-20);
        }
        assert!(pts[0].1 > pts[1].1 && pts[1].1 > pts[2].1, "{pts:?}");
        let slope = log_log_slope(&pts);
        assert!(slope <= -0.8, "slope {slope}");
    }

    #[test]
    fn channel_bws_defect_decays() {
        let pr = CutoffProfile::default();
        let end_grid = make_grid(14.0, 120, Neumann).unwrap();
        let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
        let end_op = assemble_cyl_mode(&pr, &theta(), 0.0, &end_grid, &v).unwrap();
        let r = eig_dense(&end_op.to_dense().unwrap()).unwrap();
        let (idx, gamma) = r
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - Complex64::new(-3.6, 0.0))
                    .norm()
                    .partial_cmp(&(b.1 - Complex64::new(-3.6, 0.0)).norm())
                    .unwrap()
            })
            .map(|(i, l)| (i, *l))
            .unwrap();
        let w: Vec<Complex64> = (0..end_grid.len()).map(|i| r.eigenvectors[[i, idx]]).collect();
        let mut pts = Vec::new();
        for n in [2usize, 4, 8] {
            let u_max = escape_center::<f64>(n) + n as f64 + 8.0;
            let free_pts = (u_max / 0.5).round() as usize - 1;
            let free_grid = make_grid(u_max, free_pts, Dirichlet).unwrap();
            let op = assemble_channel_mode(&pr, &theta(), 0.0, &free_grid, &end_grid, &v).unwrap();
            let lambda = gamma + theta().theta_prime() * 1.0;
            let spec = SingularSequenceSpec {
                target: BwsTarget::Channel {
                    gamma,
                    end_vector: w.clone(),
                },
                index: n,
                lambda,
                theta: theta(),
            };
            let g = build_bws(&spec, &op).unwrap();
            pts.push((n, defect_norm(&g, lambda, &op).unwrap()));
        }
        assert!(pts[0].1 > pts[1].1 && pts[1].1 > pts[2].1, "{pts:?}");
    }

    #[test]
    fn commutator_vanishes_on_the_plateau() {
        let pr = CutoffProfile::default();
        let d = 16usize;
        let u_max = 2.0 * d as f64 + 16.0;
        let n = (u_max / 0.25).round() as usize - 1;
        let grid = make_grid(u_max, n, Dirichlet).unwrap();
        let op = assemble_cyl_mode(&pr, &theta(), 0.0, &grid, &PotentialProfile::zero()).unwrap();
        // f supported where eta^(d) = 1: commutator is zero to rounding
        let f: Vec<Complex64> = grid
            .nodes()
            .map(|u| Complex64::new(bump((u - 6.0) / 3.0), 0.0))
            .collect();
        let af = op.apply(&f).unwrap();
        let eta_f = apply_plateau(&f, &op, d);
        let a_eta_f = op.apply(&eta_f).unwrap();
        let eta_af = apply_plateau(&af, &op, d);
        let mut comm: f64 = 0.0;
        for (x, y) in a_eta_f.iter().zip(&eta_af) {
            comm = comm.max((x - y).norm());
        }
        assert!(comm < 1e-12, "commutator {comm}");
    }

    #[test]
    fn commutator_decay_slope() {
        let pr = CutoffProfile::default();
        let mut ops = Vec::new();
        for d in [8usize, 16, 32] {
            let u_max = 2.0 * d as f64 + 16.0;
            let n = (u_max / 0.25).round() as usize - 1;
            let grid = make_grid(u_max, n, Dirichlet).unwrap();
            ops.push((
                d,
                assemble_cyl_mode(&pr, &theta(), 0.0, &grid, &PotentialProfile::zero()).unwrap(),
            ));
        }
        let eps = commutator_decay(&ops).unwrap();
        assert!(eps[0].1 > eps[1].1 && eps[1].1 > eps[2].1, "{eps:?}");
        let slope = log_log_slope(&eps);
        assert!(slope <= -0.8, "slope {slope}");
    }
}
