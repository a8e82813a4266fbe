//! Cutoff dilation profile, its jets, the inverse map, and the coefficients
//! of the dilated radial operator, holomorphic in the dilation parameter.
//!
//! The radial scaling is `psi(u) = (phi(u)*theta + 1)*u` with a cutoff
//! `phi` that vanishes below `K` and equals one above `R`, so the dilation
//! acts as the identity near the compact part and as `u -> (theta+1)u` far
//! out on the end.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;
use crate::Result;

/// Jacobian floor below which the dilated coefficients are refused.
const JACOBIAN_FLOOR: f64 = 1e-12;

/// Degree-7 smoothstep jet on the unit interval, clamped outside.
///
/// `s(x) = 35x^4 - 84x^5 + 70x^6 - 20x^7`; the first three derivatives
/// vanish at both ends, so piecewise joins are C^3.
pub fn smoothstep_jet<R: Real>(x: R) -> [R; 4] {
    let zero = R::zero();
    if x <= zero {
        return [zero, zero, zero, zero];
    }
    if x >= R::one() {
        return [R::one(), zero, zero, zero];
    }
    let c35 = R::lit(35.0);
    let c84 = R::lit(84.0);
    let c70 = R::lit(70.0);
    let c20 = R::lit(20.0);
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x3 * x;
    let s = (c35 - c84 * x + c70 * x2 - c20 * x3) * x4;
    let one_minus = R::one() - x;
    let s1 = R::lit(140.0) * x3 * one_minus * one_minus * one_minus;
    let s2 = R::lit(420.0) * x2 - R::lit(1680.0) * x3 + R::lit(2100.0) * x4 - R::lit(840.0) * x4 * x;
    let s3 = R::lit(840.0) * x - R::lit(5040.0) * x2 + R::lit(8400.0) * x3 - R::lit(4200.0) * x4;
    [s, s1, s2, s3]
}

/// C^3 bump supported on `[-1, 1]`, identically one on `[-1/2, 1/2]`.
pub fn bump<R: Real>(x: R) -> R {
    let two = R::lit(2.0);
    smoothstep_jet(two * x + two)[0] * smoothstep_jet(two - two * x)[0]
}

/// C^3 plateau cutoff: one on `u <= 1`, zero on `u >= 2`, nonincreasing.
pub fn plateau<R: Real>(u: R) -> R {
    R::one() - smoothstep_jet(u - R::one())[0]
}

/// Membership in the parameter region Gamma.
pub fn in_gamma<R: Real>(theta: Complex<R>) -> bool {
    theta.re > R::zero() && theta.re >= theta.im.abs() && theta.im * theta.im < R::lit(0.5)
}

/// The ray direction `theta' = 1/(theta+1)^2`.
pub fn theta_prime<R: Real>(theta: Complex<R>) -> Result<Complex<R>> {
    let shifted = theta + Complex::new(R::one(), R::zero());
    if shifted.norm() == R::zero() {
        return Err(Error::PoleAtMinusOne);
    }
    Ok((shifted * shifted).finv())
}

/// Validated dilation parameter: `theta` in Gamma or real nonnegative,
/// with the derived ray direction cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationParameter<R: Real> {
    theta: Complex<R>,
    theta_prime: Complex<R>,
}

impl<R: Real> DilationParameter<R> {
    pub fn new(theta: Complex<R>) -> Result<Self> {
        let unitary = theta.im == R::zero() && theta.re >= R::zero();
        if !unitary && !in_gamma(theta) {
            return Err(Error::InvalidTheta {
                re: theta.re.to_f64().unwrap_or(f64::NAN),
                im: theta.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            theta,
            theta_prime: theta_prime(theta)?,
        })
    }

    /// Real dilation (the unitary regime).
    pub fn real(theta: R) -> Result<Self> {
        Self::new(Complex::new(theta, R::zero()))
    }

    pub fn theta(&self) -> Complex<R> {
        self.theta
    }

    pub fn theta_prime(&self) -> Complex<R> {
        self.theta_prime
    }

    /// True when the dilation is an honest unitary (theta real >= 0).
    pub fn is_unitary(&self) -> bool {
        self.theta.im == R::zero() && self.theta.re >= R::zero()
    }
}

/// Cutoff profile: scaling starts at `K` and is complete at `R`.
///
/// The shape is fixed to the degree-7 smoothstep rescaled to `[K, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile<R: Real> {
    k: R,
    r: R,
}

impl<R: Real> Default for CutoffProfile<R> {
    fn default() -> Self {
        Self {
            k: R::lit(2.0),
            r: R::lit(4.0),
        }
    }
}

impl<R: Real> CutoffProfile<R> {
    pub fn new(k: R, r: R) -> Result<Self> {
        if !(R::zero() < k && k < r) {
            return Err(Error::InvalidProfile {
                k: k.to_f64().unwrap_or(f64::NAN),
                r: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { k, r })
    }

    pub fn inner_radius(&self) -> R {
        self.k
    }

    pub fn outer_radius(&self) -> R {
        self.r
    }

    /// Cutoff value and first three derivatives at `u`.
    ///
    /// Exact zero jet below `K` and exact `(1, 0, 0, 0)` above `R`.
    pub fn phi_jet(&self, u: R) -> [R; 4] {
        let w = self.r - self.k;
        let x = (u - self.k) / w;
        let [s, s1, s2, s3] = smoothstep_jet(x);
        [s, s1 / w, s2 / (w * w), s3 / (w * w * w)]
    }
}

/// Values of the scaling map and its first three radial derivatives at one
/// point, for a fixed `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingJet<R: Real> {
    pub psi: Complex<R>,
    pub dpsi: Complex<R>,
    pub d2psi: Complex<R>,
    pub d3psi: Complex<R>,
}

/// Scaling jet at `u`; polynomial in `theta`, hence entire in the parameter.
pub fn psi_jet<R: Real>(
    profile: &CutoffProfile<R>,
    theta: Complex<R>,
    u: R,
) -> Result<ScalingJet<R>> {
    if u < R::zero() {
        return Err(Error::NegativeRadius {
            u: u.to_f64().unwrap_or(f64::NAN),
        });
    }
    let one = Complex::new(R::one(), R::zero());
    let zero = Complex::new(R::zero(), R::zero());
    if u <= profile.k {
        return Ok(ScalingJet {
            psi: Complex::new(u, R::zero()),
            dpsi: one,
            d2psi: zero,
            d3psi: zero,
        });
    }
    if u >= profile.r {
        let scale = theta + one;
        return Ok(ScalingJet {
            psi: scale.scale(u),
            dpsi: scale,
            d2psi: zero,
            d3psi: zero,
        });
    }
    let [p, p1, p2, p3] = profile.phi_jet(u);
    let two = R::lit(2.0);
    let three = R::lit(3.0);
    Ok(ScalingJet {
        psi: (theta.scale(p) + one).scale(u),
        dpsi: theta.scale(p1 * u + p) + one,
        d2psi: theta.scale(p2 * u + two * p1),
        d3psi: theta.scale(p3 * u + three * p2),
    })
}

/// Coefficients of `d^2/du^2`, `d/du`, and the identity in the localized
/// dilated radial operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTriple<R: Real> {
    pub a2: Complex<R>,
    pub a1: Complex<R>,
    pub a0: Complex<R>,
}

/// Dilated-operator coefficients at `u`.
///
/// Outside the transition band the reduction is taken as an exact branch:
/// `(-1, 0, 0)` below `K` and `(-theta', 0, 0)` above `R`. Inside the band
/// the rational expressions in the scaling jet are used directly so the
/// result stays holomorphic in `theta`:
///
/// ```text
/// a2 = -1/P^2,  a1 = 2Q/P^3,  a0 = T/(2P^3) - (5/4) Q^2/P^4
/// ```
///
/// with `(P, Q, T)` the first three derivatives of the scaling map.
pub fn dilation_coefficients<R: Real>(
    profile: &CutoffProfile<R>,
    param: &DilationParameter<R>,
    u: R,
) -> Result<CoefficientTriple<R>> {
    if u < R::zero() {
        return Err(Error::NegativeRadius {
            u: u.to_f64().unwrap_or(f64::NAN),
        });
    }
    let zero = Complex::new(R::zero(), R::zero());
    if u <= profile.k {
        return Ok(CoefficientTriple {
            a2: -Complex::new(R::one(), R::zero()),
            a1: zero,
            a0: zero,
        });
    }
    if u >= profile.r {
        return Ok(CoefficientTriple {
            a2: -param.theta_prime(),
            a1: zero,
            a0: zero,
        });
    }
    let jet = psi_jet(profile, param.theta(), u)?;
    let p = jet.dpsi;
    if p.norm() < R::lit(JACOBIAN_FLOOR) {
        return Err(Error::DegenerateJacobian {
            u: u.to_f64().unwrap_or(f64::NAN),
            abs_dpsi: p.norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    let q = jet.d2psi;
    let t = jet.d3psi;
    let p2 = p * p;
    let p3 = p2 * p;
    let p4 = p2 * p2;
    let a2 = -p2.finv();
    let a1 = q.scale(R::lit(2.0)) / p3;
    let a0 = t.scale(R::lit(0.5)) / p3 - (q * q).scale(R::lit(1.25)) / p4;
    Ok(CoefficientTriple { a2, a1, a0 })
}

/// Inverse of the scaling map for real `theta >= 0` (Newton iteration;
/// the map is strictly increasing with derivative >= 1).
pub fn inverse_scaling<R: Real>(profile: &CutoffProfile<R>, theta: R, x: R) -> Result<R> {
    if theta < R::zero() {
        return Err(Error::ComplexThetaUnsupported);
    }
    if x < R::zero() {
        return Err(Error::NegativeRadius {
            u: x.to_f64().unwrap_or(f64::NAN),
        });
    }
    if x <= profile.k {
        return Ok(x);
    }
    let ctheta = Complex::new(theta, R::zero());
    let full = (R::one() + theta) * profile.r;
    let mut a = if x >= full { x / (R::one() + theta) } else { x };
    for _ in 0..64 {
        let jet = psi_jet(profile, ctheta, a)?;
        let step = (jet.psi.re - x) / jet.dpsi.re;
        a = a - step;
        if step.abs() <= R::lit(1e-15) * (R::one() + a.abs()) {
            break;
        }
    }
    Ok(a.max(R::zero()))
}
