//! Desk-scale model geometries: cross-section spectral data, radial grids,
//! and compactly supported potentials standing in for the compact pieces.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;
use crate::scaling::{smoothstep_jet, CutoffProfile};
use crate::Result;

/// Minimum number of interior grid points.
const MIN_GRID_POINTS: usize = 16;

/// Boundary condition at the inner end of a half-line grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Ordered cross-section eigenvalues with mode labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSpectrum<R: Real> {
    mus: Vec<R>,
    labels: Vec<String>,
}

impl<R: Real> CrossSectionSpectrum<R> {
    /// Build from raw eigenvalues; sorts and validates nonnegativity.
    pub fn new(mut pairs: Vec<(R, String)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("mu is NaN"));
        if pairs.iter().any(|(m, _)| *m < R::zero()) {
            return Err(Error::InvalidGrid {
                reason: "cross-section eigenvalues must be nonnegative".into(),
            });
        }
        let (mus, labels) = pairs.into_iter().unzip();
        Ok(Self { mus, labels })
    }

    pub fn thresholds(&self) -> &[R] {
        &self.mus
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (R, &str)> {
        self.mus.iter().copied().zip(self.labels.iter().map(String::as_str))
    }
}

/// Circle cross-section of the given radius: eigenvalues `(k/radius)^2`
/// with multiplicity two for `k >= 1`, truncated to `n_modes` entries.
pub fn circle_cross_section<R: Real>(n_modes: usize, radius: R) -> Result<CrossSectionSpectrum<R>> {
    if n_modes == 0 || radius <= R::zero() {
        return Err(Error::InvalidGrid {
            reason: format!("circle cross-section needs n_modes >= 1 and radius > 0, got {n_modes}"),
        });
    }
    let mut pairs = Vec::with_capacity(n_modes);
    pairs.push((R::zero(), "k0".to_string()));
    let mut k = 1usize;
    while pairs.len() < n_modes {
        let mu = (R::from_usize(k).unwrap() / radius).powi(2);
        pairs.push((mu, format!("k{k}+")));
        if pairs.len() < n_modes {
            pairs.push((mu, format!("k{k}-")));
        }
        k += 1;
    }
    CrossSectionSpectrum::new(pairs)
}

/// Uniform interior grid on `(0, u_max)`: nodes `u_j = j h`, `j = 1..n`,
/// `h = u_max/(n+1)`. Dirichlet at `u_max`; configurable at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineGrid<R: Real> {
    u_max: R,
    n: usize,
    bc0: BoundaryCondition,
}

impl<R: Real> HalfLineGrid<R> {
    pub fn new(u_max: R, n: usize, bc0: BoundaryCondition) -> Result<Self> {
        if u_max <= R::zero() || n < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid {
                reason: format!("need u_max > 0 and n >= {MIN_GRID_POINTS}, got u_max = {u_max}, n = {n}"),
            });
        }
        Ok(Self { u_max, n, bc0 })
    }

    pub fn u_max(&self) -> R {
        self.u_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bc0(&self) -> BoundaryCondition {
        self.bc0
    }

    pub fn spacing(&self) -> R {
        self.u_max / R::from_usize(self.n + 1).unwrap()
    }

    pub fn node(&self, j: usize) -> R {
        self.spacing() * R::from_usize(j + 1).unwrap()
    }

    pub fn nodes(&self) -> impl Iterator<Item = R> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Nested refinement: `n -> 2n + 1` keeps every old node.
    pub fn refine(&self) -> Result<Self> {
        Self::new(self.u_max, 2 * self.n + 1, self.bc0)
    }

    /// Discrete L^2 norm (`sqrt(h) * ||.||_2`) of a grid function.
    pub fn norm(&self, f: &[num_complex::Complex<R>]) -> R {
        let s = f.iter().map(|z| z.norm_sqr()).fold(R::zero(), |a, b| a + b);
        (s * self.spacing()).sqrt()
    }

    /// Discrete inner product, conjugate-linear in the second slot.
    pub fn inner(
        &self,
        f: &[num_complex::Complex<R>],
        g: &[num_complex::Complex<R>],
    ) -> num_complex::Complex<R> {
        let mut acc = num_complex::Complex::new(R::zero(), R::zero());
        for (a, b) in f.iter().zip(g) {
            acc += a * b.conj();
        }
        acc.scale(self.spacing())
    }
}

/// Grid constructor mirroring the module contract.
pub fn make_grid<R: Real>(u_max: R, n: usize, bc0: BoundaryCondition) -> Result<HalfLineGrid<R>> {
    HalfLineGrid::new(u_max, n, bc0)
}

/// Compactly supported radial potential; vanishes identically at and
/// beyond `support_end`, which must not exceed the scaling radius `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile<R: Real> {
    terms: Vec<GaussianTerm<R>>,
    support_end: R,
}

/// One Gaussian component `amplitude * exp(-((u-center)/width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm<R: Real> {
    pub amplitude: R,
    pub center: R,
    pub width: R,
}

/// Fraction of the support over which the taper to zero acts.
const TAPER_START_FRACTION: f64 = 0.75;

impl<R: Real> PotentialProfile<R> {
    /// Identically zero potential.
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            support_end: R::zero(),
        }
    }

    /// Sum of Gaussian terms, tapered smoothly to zero at `support_end`.
    pub fn from_terms(
        terms: Vec<GaussianTerm<R>>,
        support_end: R,
        profile: &CutoffProfile<R>,
    ) -> Result<Self> {
        if support_end > profile.inner_radius() {
            return Err(Error::SupportViolation {
                support_end: support_end.to_f64().unwrap_or(f64::NAN),
                k: profile.inner_radius().to_f64().unwrap_or(f64::NAN),
            });
        }
        if terms.iter().any(|t| t.width <= R::zero()) {
            return Err(Error::InvalidGrid {
                reason: "potential widths must be positive".into(),
            });
        }
        Ok(Self { terms, support_end })
    }

    pub fn support_end(&self) -> R {
        self.support_end
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluate the potential; exactly zero at and beyond `support_end`.
    pub fn eval(&self, u: R) -> R {
        if self.terms.is_empty() || u >= self.support_end {
            return R::zero();
        }
        let a = self.support_end * R::lit(TAPER_START_FRACTION);
        let taper = R::one() - smoothstep_jet((u - a) / (self.support_end - a))[0];
        let mut v = R::zero();
        for t in &self.terms {
            let arg = (u - t.center) / t.width;
            v += t.amplitude * (-arg * arg).exp();
        }
        v * taper
    }
}

/// Attractive Gaussian well `-depth * exp(-((u-center)/width)^2)`, tapered
/// to vanish at `support_end`.
pub fn gaussian_well<R: Real>(
    depth: R,
    center: R,
    width: R,
    support_end: R,
    profile: &CutoffProfile<R>,
) -> Result<PotentialProfile<R>> {
    if depth == R::zero() {
        return Ok(PotentialProfile::zero());
    }
    PotentialProfile::from_terms(
        vec![GaussianTerm {
            amplitude: -depth,
            center,
            width,
        }],
        support_end,
        profile,
    )
}

/// Well-plus-barrier profile used to produce shape resonances.
pub fn well_with_barrier<R: Real>(
    depth: R,
    barrier: R,
    profile: &CutoffProfile<R>,
) -> Result<PotentialProfile<R>> {
    PotentialProfile::from_terms(
        vec![
            GaussianTerm {
                amplitude: -depth,
                center: R::lit(0.6),
                width: R::lit(0.35),
            },
            GaussianTerm {
                amplitude: barrier,
                center: R::lit(1.3),
                width: R::lit(0.3),
            },
        ],
        R::lit(1.8),
        profile,
    )
}

/// Separable 2D corner potential `-depth * g(u1) g(u2)` with Gaussian
/// factors tapered to vanish where `max(u1, u2) >= support_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerPotential<R: Real> {
    pub depth: R,
    pub center: R,
    pub width: R,
    pub support_end: R,
}

impl<R: Real> CornerPotential<R> {
    pub fn new(depth: R, center: R, width: R, support_end: R, profile: &CutoffProfile<R>) -> Result<Self> {
        if support_end > profile.inner_radius() {
            return Err(Error::SupportViolation {
                support_end: support_end.to_f64().unwrap_or(f64::NAN),
                k: profile.inner_radius().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            depth,
            center,
            width,
            support_end,
        })
    }

    fn factor(&self, u: R) -> R {
        if u >= self.support_end {
            return R::zero();
        }
        let a = self.support_end * R::lit(TAPER_START_FRACTION);
        let taper = R::one() - smoothstep_jet((u - a) / (self.support_end - a))[0];
        let arg = (u - self.center) / self.width;
        (-arg * arg).exp() * taper
    }

    pub fn eval(&self, u1: R, u2: R) -> R {
        -self.depth * self.factor(u1) * self.factor(u2)
    }
}

/// Model data for a codimension-2 corner: shared cross-section, one grid
/// and one end potential per axis, and an optional 2D corner well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerModel<R: Real> {
    pub cross_section: CrossSectionSpectrum<R>,
    pub grid1: HalfLineGrid<R>,
    pub grid2: HalfLineGrid<R>,
    pub end_potential1: PotentialProfile<R>,
    pub end_potential2: PotentialProfile<R>,
    pub corner_potential: Option<CornerPotential<R>>,
}
