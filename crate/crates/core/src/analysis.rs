//! Spectral analysis of the raw eigenvalue data: predicted essential-
//! spectrum rays, ray/discrete classification, resonance detection by
//! rotation stability, sector fitting, tensor-sum checks, and numerical
//! holomorphy certificates.

use ndarray::Array2;
use num_complex::Complex;
use serde::Serialize;

use crate::error::Error;
use crate::geometry::CrossSectionSpectrum;
use crate::linalg::eigvals_dense;
use crate::scalar::{EigScalar, Real};
use crate::scaling::{in_gamma, DilationParameter};
use crate::Result;

/// Where a predicted ray comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RayProvenance {
    CrossSectionThreshold,
    EndEigenvalue,
    EndResonance,
}

/// A family of essential-spectrum rays `origin + direction * [0, inf)`
/// with a direction common to all rays.
#[derive(Debug, Clone)]
pub struct RayFamily<R: Real> {
    pub origins: Vec<Complex<R>>,
    pub direction: Complex<R>,
    pub provenance: Vec<RayProvenance>,
}

impl<R: Real> RayFamily<R> {
    /// Smallest distance from `z` to any ray, with the index of the ray.
    pub fn nearest(&self, z: Complex<R>) -> (usize, R) {
        let mut best = (0usize, R::infinity());
        for (i, &origin) in self.origins.iter().enumerate() {
            let d = ray_distance(z, origin, self.direction);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Ray parameter of the projection of `z` onto ray `i` (clamped at 0).
    pub fn parameter(&self, i: usize, z: Complex<R>) -> R {
        let rel = z - self.origins[i];
        let t = (rel * self.direction.conj()).re / self.direction.norm_sqr();
        t.max(R::zero())
    }
}

/// Euclidean distance from `z` to the ray `origin + direction * [0, inf)`.
pub fn ray_distance<R: Real>(z: Complex<R>, origin: Complex<R>, direction: Complex<R>) -> R {
    let rel = z - origin;
    let t = (rel * direction.conj()).re / direction.norm_sqr();
    if t <= R::zero() {
        rel.norm()
    } else {
        (rel - direction.scale(t)).norm()
    }
}

/// Predicted essential-spectrum rays.
///
/// Cylinder variant (`end_eigs` empty): one ray per cross-section
/// threshold. Corner variant: additionally one ray per supplied discrete
/// eigenvalue of a dilated end operator, with real entries tagged as end
/// eigenvalues and nonreal ones as end resonances.
pub fn predict_essential<R: Real>(
    theta: &DilationParameter<R>,
    cross_section: &CrossSectionSpectrum<R>,
    end_eigs: &[Vec<Complex<R>>],
) -> RayFamily<R> {
    let mut origins: Vec<Complex<R>> = Vec::new();
    let mut provenance = Vec::new();
    for mu in cross_section.thresholds() {
        origins.push(Complex::new(*mu, R::zero()));
        provenance.push(RayProvenance::CrossSectionThreshold);
    }
    for per_end in end_eigs {
        for &gamma in per_end {
            origins.push(gamma);
            provenance.push(if gamma.im.abs() <= R::lit(1e-9) * (R::one() + gamma.re.abs()) {
                RayProvenance::EndEigenvalue
            } else {
                RayProvenance::EndResonance
            });
        }
    }
    RayFamily {
        origins,
        direction: theta.theta_prime(),
        provenance,
    }
}

/// One classified eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifiedEigenvalue<R: Real> {
    pub value: Complex<R>,
    /// Index of the nearest ray in the family.
    pub ray: usize,
    /// Distance to that ray.
    pub distance: R,
    /// Ray parameter of the projection.
    pub t: R,
}

/// Eigenvalues partitioned into ray-bound points and discrete candidates.
#[derive(Debug, Clone)]
pub struct SpectrumClassification<R: Real> {
    pub ray_bound: Vec<ClassifiedEigenvalue<R>>,
    pub discrete: Vec<ClassifiedEigenvalue<R>>,
    pub tolerance: R,
}

impl<R: Real> SpectrumClassification<R> {
    pub fn discrete_values(&self) -> Vec<Complex<R>> {
        self.discrete.iter().map(|c| c.value).collect()
    }
}

/// Default classification tolerance `20 h^2 (1 + |mu_max|)`.
pub fn default_classification_tolerance<R: Real>(h: R, mu_max: R) -> R {
    R::lit(20.0) * h * h * (R::one() + mu_max.abs())
}

/// Assign each eigenvalue to its nearest ray (distance <= tol) or to the
/// discrete list. The partition is exhaustive and disjoint.
pub fn classify_spectrum<R: Real>(
    eigs: &[Complex<R>],
    rays: &RayFamily<R>,
    tol: R,
) -> SpectrumClassification<R> {
    let mut ray_bound = Vec::new();
    let mut discrete = Vec::new();
    for &z in eigs {
        let (ray, distance) = rays.nearest(z);
        let entry = ClassifiedEigenvalue {
            value: z,
            ray,
            distance,
            t: rays.parameter(ray, z),
        };
        if distance <= tol {
            ray_bound.push(entry);
        } else {
            discrete.push(entry);
        }
    }
    SpectrumClassification {
        ray_bound,
        discrete,
        tolerance: tol,
    }
}

/// A matched discrete eigenvalue from a two-rotation run.
#[derive(Debug, Clone, Serialize)]
pub struct ResonanceMatch<R: Real> {
    /// Value from the first rotation.
    pub value: Complex<R>,
    /// Separation between the two rotations' values.
    pub separation: R,
    /// True if the matched value is real within `match_tol`.
    pub is_real: bool,
}

/// Discrete eigenvalues that persist across two distinct rotations.
///
/// Nonreal matches are resonance candidates; real matches are eigenvalue
/// candidates of the undilated operator.
pub fn detect_resonances<R: Real>(
    eigs_a: &[Complex<R>],
    theta_a: &DilationParameter<R>,
    eigs_b: &[Complex<R>],
    theta_b: &DilationParameter<R>,
    rays_a: &RayFamily<R>,
    rays_b: &RayFamily<R>,
    tol: R,
    match_tol: R,
) -> Result<Vec<ResonanceMatch<R>>> {
    let arg_a = theta_a.theta_prime().arg();
    let arg_b = theta_b.theta_prime().arg();
    if arg_a == arg_b || !in_gamma(theta_a.theta()) || !in_gamma(theta_b.theta()) {
        return Err(Error::InvalidTheta {
            re: theta_b.theta().re.to_f64().unwrap_or(f64::NAN),
            im: theta_b.theta().im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let da = classify_spectrum(eigs_a, rays_a, tol).discrete;
    let db = classify_spectrum(eigs_b, rays_b, tol).discrete;
    let mut used = vec![false; db.len()];
    let mut matches = Vec::new();
    for a in &da {
        let mut best: Option<(usize, R)> = None;
        for (j, b) in db.iter().enumerate() {
            if used[j] {
                continue;
            }
            let sep = (a.value - b.value).norm();
            if best.map_or(true, |(_, s)| sep < s) {
                best = Some((j, sep));
            }
        }
        if let Some((j, sep)) = best {
            if sep <= match_tol {
                used[j] = true;
                matches.push(ResonanceMatch {
                    value: a.value,
                    separation: sep,
                    is_real: a.value.im.abs() <= match_tol,
                });
            }
        }
    }
    Ok(matches)
}

/// Verdict of the tensor-sum spectral check.
#[derive(Debug, Clone)]
pub struct SumCheck<R: Real> {
    pub computed: Vec<Complex<R>>,
    pub predicted: Vec<Complex<R>>,
    pub max_mismatch: R,
    /// Pairs whose greedy match exceeded the refusal threshold.
    pub refused: usize,
}

/// Greedy nearest-neighbour refusal threshold for the sum check.
const SUMCHECK_REFUSAL: f64 = 1e-4;

/// Spectral sum law for Kronecker sums: compares `eig(A ⊗ I + I ⊗ B)`
/// against the multiset `{alpha + beta}`.
pub fn ichinose_sumcheck<R: EigScalar>(
    a: &Array2<Complex<R>>,
    b: &Array2<Complex<R>>,
) -> Result<SumCheck<R>> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut eye_a = Array2::zeros((na, na));
    for i in 0..na {
        eye_a[[i, i]] = Complex::new(R::one(), R::zero());
    }
    let mut eye_b = Array2::zeros((nb, nb));
    for i in 0..nb {
        eye_b[[i, i]] = Complex::new(R::one(), R::zero());
    }
    let big = crate::linalg::kron(a, &eye_b) + crate::linalg::kron(&eye_a, b);
    let computed = eigvals_dense(&big)?;
    let ea = eigvals_dense(a)?;
    let eb = eigvals_dense(b)?;
    let mut predicted: Vec<Complex<R>> = ea
        .iter()
        .flat_map(|x| eb.iter().map(move |y| x + y))
        .collect();
    predicted.sort_by(|p, q| p.re.partial_cmp(&q.re).unwrap().then(p.im.partial_cmp(&q.im).unwrap()));
    let mut used = vec![false; predicted.len()];
    let mut max_mismatch = R::zero();
    let mut refused = 0usize;
    for &z in &computed {
        let mut best = (usize::MAX, R::infinity());
        for (j, &p) in predicted.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (z - p).norm();
            if d < best.1 {
                best = (j, d);
            }
        }
        used[best.0] = true;
        if best.1 > R::lit(SUMCHECK_REFUSAL) {
            refused += 1;
        }
        if best.1 > max_mismatch {
            max_mismatch = best.1;
        }
    }
    Ok(SumCheck {
        computed,
        predicted,
        max_mismatch,
        refused,
    })
}

/// Sector certificate: `Re(s) + gamma >= k |Im(s)|` for all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector<R: Real> {
    pub gamma: R,
    pub k: R,
}

/// Find the smallest vertical shift `gamma >= 0` admitting any slope from
/// `k_grid`, then the largest admissible slope at that shift.
pub fn sector_search<R: Real>(samples: &[Complex<R>], k_grid: &[R]) -> Option<Sector<R>> {
    if samples.is_empty() || k_grid.is_empty() {
        return None;
    }
    let mut ks: Vec<R> = k_grid.to_vec();
    ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let gamma_for = |k: R| -> R {
        samples
            .iter()
            .map(|s| k * s.im.abs() - s.re)
            .fold(R::zero(), |a, b| a.max(b))
    };
    let gamma = gamma_for(ks[0]);
    let mut best_k = None;
    for &k in &ks {
        let admissible = samples.iter().all(|s| s.re + gamma >= k * s.im.abs());
        if admissible {
            best_k = Some(k);
        }
    }
    best_k.map(|k| Sector { gamma, k })
}

/// Numerical holomorphy certificate: normalized trapezoidal contour
/// integral of `f` over the circle of the given radius about `center`;
/// values near zero certify holomorphy inside the disc.
pub fn holomorphy_check<R: Real, F: FnMut(Complex<R>) -> Complex<R>>(
    mut f: F,
    center: Complex<R>,
    radius: R,
    m: usize,
) -> Result<R> {
    if m < 16 {
        return Err(Error::InvalidGrid {
            reason: format!("holomorphy contour needs m >= 16 points, got {m}"),
        });
    }
    let mut sum = Complex::new(R::zero(), R::zero());
    let mut max_abs = R::zero();
    let step = R::lit(2.0) * R::PI() / R::from_usize(m).unwrap();
    for k in 0..m {
        let t = step * R::from_usize(k).unwrap();
        let dir = Complex::new(t.cos(), t.sin());
        let z = center + dir.scale(radius);
        let dz = Complex::new(-t.sin(), t.cos()).scale(radius * step);
        let val = f(z);
        max_abs = max_abs.max(val.norm());
        sum += val * dz;
    }
    Ok(sum.norm() / (radius * max_abs.max(R::min_positive_value())))
}
