//! Unit-area quadratic differentials on the torus and the Teichmüller
//! horocycle flow.
//!
//! A marked quadratic differential is recorded by the holonomies `w1`, `w2`
//! of the basis curves `1/0` and `0/1`. Real parts measure the vertical
//! foliation (`|dx|`), imaginary parts the horizontal one (`|dy|`). The
//! horocycle flow shears `(x, y) ↦ (x + ty, y)` and so fixes the horizontal
//! foliation.
//!
//! Naming note: the pairing with the vertical foliation integrates `|dx|`.
//! Some texts attach the opposite labels to these two integrals; only the
//! integrals matter for the bounds below, so the names here follow the
//! foliation definitions.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::boundary::{detect_limit, fit_direction, foliation_vec, proj_dist, ProjectiveVector};
use crate::error::{Error, Result};
use crate::flow::{FlowTrace, PreparedFlow};
use crate::slopes::{CurveFamily, FoliationVector, Slope};
use crate::torus::TorusPoint;

/// Allowed deviation of the area from 1.
pub const AREA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "repr::Qd", into = "repr::Qd"))]
pub struct MarkedQuadDiff {
    w1: Complex64,
    w2: Complex64,
}

/// `a·b − c·d` with one rounding error per product compensated.
fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let e = libm::fma(-c, d, w);
    let f = libm::fma(a, b, -w);
    f + e
}

fn area_of(w1: Complex64, w2: Complex64) -> f64 {
    diff_of_products(w1.re, w2.im, w1.im, w2.re)
}

/// Builds a marked differential from basis holonomies, optionally rescaling
/// to unit area.
pub fn make_qd(w1: Complex64, w2: Complex64, normalize: bool) -> Result<MarkedQuadDiff> {
    let finite = w1.re.is_finite() && w1.im.is_finite() && w2.re.is_finite() && w2.im.is_finite();
    let area = area_of(w1, w2);
    if !finite || !(area > 0.0) {
        return Err(Error::InvalidBasis { area });
    }
    if normalize {
        let k = 1.0 / libm::sqrt(area);
        return Ok(MarkedQuadDiff { w1: w1 * k, w2: w2 * k });
    }
    if libm::fabs(area - 1.0) > AREA_TOL {
        return Err(Error::AreaError { area });
    }
    Ok(MarkedQuadDiff { w1, w2 })
}

impl MarkedQuadDiff {
    /// The square torus `(1, i)`.
    pub const SQUARE: MarkedQuadDiff =
        MarkedQuadDiff { w1: Complex64 { re: 1.0, im: 0.0 }, w2: Complex64 { re: 0.0, im: 1.0 } };

    /// The unit-area differential `dz²` on the torus `τ`.
    pub fn from_torus_point(tau: TorusPoint) -> MarkedQuadDiff {
        let k = 1.0 / libm::sqrt(tau.y);
        MarkedQuadDiff { w1: Complex64::new(k, 0.0), w2: tau.to_complex() * k }
    }

    pub fn w1(&self) -> Complex64 {
        self.w1
    }

    pub fn w2(&self) -> Complex64 {
        self.w2
    }

    pub fn area(&self) -> f64 {
        area_of(self.w1, self.w2)
    }

    pub fn holonomy(&self, s: Slope) -> Complex64 {
        let (p, q) = (s.p() as f64, s.q() as f64);
        Complex64::new(p * self.w1.re + q * self.w2.re, p * self.w1.im + q * self.w2.im)
    }

    /// The flow-invariant horizontal foliation, as the vector `η` with
    /// `i(η, s) = pairing_h(s)`.
    pub fn invariant_foliation(&self) -> FoliationVector {
        FoliationVector { a: self.w2.im, b: -self.w1.im }
    }

    /// Rotates both holonomies by `e^{iθ}`.
    pub fn rotate(&self, theta: f64) -> MarkedQuadDiff {
        let r = Complex64::new(libm::cos(theta), libm::sin(theta));
        MarkedQuadDiff { w1: self.w1 * r, w2: self.w2 * r }
    }
}

/// `i(V_q, s)`: total `|dx|` along the straight representative of `s`.
pub fn pairing_v(q: &MarkedQuadDiff, s: Slope) -> f64 {
    libm::fabs(q.holonomy(s).re)
}

/// `i(H_q, s)`: total `|dy|` along the straight representative of `s`.
pub fn pairing_h(q: &MarkedQuadDiff, s: Slope) -> f64 {
    libm::fabs(q.holonomy(s).im)
}

/// `|q|^{1/2}`-length of the geodesic representative of `s`.
pub fn flat_length(q: &MarkedQuadDiff, s: Slope) -> f64 {
    let h = q.holonomy(s);
    libm::hypot(h.re, h.im)
}

pub fn horocycle_step(q: &MarkedQuadDiff, t: f64) -> MarkedQuadDiff {
    let step = |w: Complex64| Complex64::new(libm::fma(t, w.im, w.re), w.im);
    MarkedQuadDiff { w1: step(q.w1), w2: step(q.w2) }
}

pub fn geodesic_step(q: &MarkedQuadDiff, s: f64) -> MarkedQuadDiff {
    let (e, ie) = (libm::exp(s), libm::exp(-s));
    let step = |w: Complex64| Complex64::new(e * w.re, ie * w.im);
    MarkedQuadDiff { w1: step(q.w1), w2: step(q.w2) }
}

/// Underlying point of Teichmüller space, `τ = w2 / w1`.
pub fn project_tau(q: &MarkedQuadDiff) -> TorusPoint {
    let z = q.w2 / q.w1;
    // Im τ = area / |w1|², computed without cancellation.
    let y = q.area() / q.w1.norm_sqr();
    TorusPoint { x: z.re, y }
}

/// Per-slope bound data for the normalized current `L_t(s)/|t|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentBounds {
    /// `L_t(s) / |t|`.
    pub value: f64,
    pub v: f64,
    pub h: f64,
    /// `|value − h|`.
    pub deviation: f64,
    /// Largest violation of `max(v_t, h_t) ≤ L_t ≤ v_t + h_t` at time `t`.
    pub sandwich_violation: f64,
}

impl CurrentBounds {
    /// `|value − h| ≤ 2v/|t|`, checked with absolute slack.
    pub fn two_v_bound_holds(&self, t: f64, slack: f64) -> bool {
        self.deviation <= 2.0 * self.v / libm::fabs(t) + slack
    }

    /// `|value − h| ≤ (v + h)/|t|`, which holds for every slope and time.
    pub fn sum_bound_holds(&self, t: f64, slack: f64) -> bool {
        self.deviation <= (self.v + self.h) / libm::fabs(t) + slack
    }
}

pub fn current_bounds(q: &MarkedQuadDiff, s: Slope, t: f64) -> CurrentBounds {
    let qt = horocycle_step(q, t);
    let l = flat_length(&qt, s);
    let (vt, ht) = (pairing_v(&qt, s), pairing_h(&qt, s));
    let violation = (vt.max(ht) - l).max(l - (vt + ht)).max(0.0);
    let (v, h) = (pairing_v(q, s), pairing_h(q, s));
    let value = l / libm::fabs(t);
    CurrentBounds { value, v, h, deviation: libm::fabs(value - h), sandwich_violation: violation }
}

/// Horocycle trace of the normalized currents `L_{h^t q}(s)/|t|` over `fam`.
pub fn current_limit_trace(q: &MarkedQuadDiff, fam: &CurveFamily, schedule: &[f64]) -> Result<FlowTrace> {
    if schedule.first().is_some_and(|t| *t <= 0.0) {
        return Err(Error::ConfigError("schedule must be positive".into()));
    }
    PreparedFlow::horocycle(*q, fam.clone()).run(schedule)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonality {
    pub limit: ProjectiveVector,
    /// Unit foliation best matching the limit.
    pub fitted: FoliationVector,
    /// `|det|` of the unit fitted and invariant directions.
    pub orthogonality: f64,
    /// `proj_dist` of the limit to the invariant foliation's vector.
    pub invariant_distance: f64,
    pub rate: f64,
}

/// Detects the projective limit of the horocycle path of `q` and measures
/// its intersection with the invariant foliation.
pub fn accumulation_orthogonality(
    q: &MarkedQuadDiff,
    fam: &CurveFamily,
    schedule: &[f64],
    tol: f64,
    window: usize,
) -> Result<Orthogonality> {
    if !fam.separates_boundary() {
        return Err(Error::Inconclusive("family too small to separate boundary points"));
    }
    let trace = current_limit_trace(q, fam, schedule)?;
    let vs: Vec<_> = trace.vectors();
    let det = detect_limit(&trace.times(), &vs, tol, window)?;
    let limit = det.limit.ok_or(Error::Inconclusive("no projective limit within the schedule"))?;
    let fitted = fit_direction(&limit);
    let eta = q.invariant_foliation();
    let n = eta.norm();
    let eta_hat = FoliationVector { a: eta.a / n, b: eta.b / n };
    let orthogonality = libm::fabs(fitted.det(eta_hat));
    let invariant_distance = proj_dist(&limit, &foliation_vec(eta, fam)?)?;
    Ok(Orthogonality { limit, fitted, orthogonality, invariant_distance, rate: det.rate })
}

#[cfg(feature = "serde")]
mod repr {
    use super::*;

    #[derive(serde::Serialize, serde::Deserialize)]
    pub struct C {
        re: f64,
        im: f64,
    }

    #[derive(serde::Serialize, serde::Deserialize)]
    pub struct Qd {
        w1: C,
        w2: C,
    }

    impl TryFrom<Qd> for MarkedQuadDiff {
        type Error = Error;

        fn try_from(r: Qd) -> Result<MarkedQuadDiff> {
            make_qd(Complex64::new(r.w1.re, r.w1.im), Complex64::new(r.w2.re, r.w2.im), false)
        }
    }

    impl From<MarkedQuadDiff> for Qd {
        fn from(q: MarkedQuadDiff) -> Qd {
            Qd { w1: C { re: q.w1.re, im: q.w1.im }, w2: C { re: q.w2.re, im: q.w2.im } }
        }
    }
}
