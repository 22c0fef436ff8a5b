//! The flat-torus model of Teichmüller space.
//!
//! A point `τ = x + iy` (`y > 0`) is the marked unit-area torus whose lattice
//! is spanned by `(1, τ)/√y`. The slope `(p, q)` has holonomy
//! `(p + qτ)/√y`, and since the flat metric is extremal on a torus,
//! `Ext_{(p,q)}(τ) = |p + qτ|² / y`.
//!
//! Marking convention: a mapping class `M` acts so that
//! `Ext_β(act_tau(M, τ)) = Ext_{Mβ}(τ)`. Under this convention the unit
//! horizontal shear `τ ↦ τ + 1` is the positive Dehn twist about `1/0`, and
//! an earthquake of time `ℓ_α` is exactly one positive twist about `α`.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::slopes::{twist_matrix, CurveFamily, FoliationVector, MappingClass, Slope};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusPoint {
    #[cfg_attr(feature = "serde", serde(rename = "re"))]
    pub x: f64,
    #[cfg_attr(feature = "serde", serde(rename = "im"))]
    pub y: f64,
}

impl TorusPoint {
    /// The square torus `τ = i`.
    pub const I: TorusPoint = TorusPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<TorusPoint> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(Error::InvalidPoint);
        }
        Ok(TorusPoint { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<TorusPoint> {
        TorusPoint::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Holonomy of `v` on the unit-area torus, `(a + bτ)/√y`.
    pub fn holonomy(self, v: FoliationVector) -> Complex64 {
        Complex64::new(v.a + v.b * self.x, v.b * self.y) / libm::sqrt(self.y)
    }
}

/// `|a + bτ|² / Im τ`.
pub fn ext_length(v: FoliationVector, tau: TorusPoint) -> f64 {
    let re = v.a + v.b * tau.x;
    let im = v.b * tau.y;
    (re * re + im * im) / tau.y
}

/// Flat length of `v` on the unit-area torus, `√Ext`.
pub fn flat_length(v: FoliationVector, tau: TorusPoint) -> f64 {
    libm::hypot(v.a + v.b * tau.x, v.b * tau.y) / libm::sqrt(tau.y)
}

/// Re-marks `τ` by `m`: `τ ↦ (dτ + b)/(cτ + a)` for `m = (a, b; c, d)`.
///
/// This is the unique Möbius action with `Ext_β(act_tau(m, τ)) = Ext_{mβ}(τ)`;
/// it is a right action, `act_tau(m, act_tau(n, τ)) = act_tau(n·m, τ)`.
pub fn act_tau(m: MappingClass, tau: TorusPoint) -> TorusPoint {
    let z = tau.to_complex();
    let w = (z * m.d as f64 + m.b as f64) / (z * m.c as f64 + m.a as f64);
    // det = 1 keeps the image in the upper half-plane; clamp round-off only.
    TorusPoint { x: w.re, y: w.im.max(f64::MIN_POSITIVE) }
}

/// Teichmüller distance, `½·d_hyp(τ₁, τ₂)` with the curvature −1 metric on
/// the upper half-plane.
pub fn teich_dist(t1: TorusPoint, t2: TorusPoint) -> f64 {
    let dx = t1.x - t2.x;
    let dy = t1.y - t2.y;
    let u = (dx * dx + dy * dy) / (2.0 * t1.y * t2.y);
    // acosh(1 + u) without cancellation near 0.
    0.5 * libm::log1p(u + libm::sqrt(u * (u + 2.0)))
}

/// Result of the certified slope search for the Teichmüller distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FareyDistance {
    /// `½ log` of the best Ext ratio found; a lower bound for the distance.
    pub distance: f64,
    /// Certified upper bound for the distance.
    pub upper_bound: f64,
    /// Slope attaining `distance`.
    pub best: Slope,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Cone {
    ub: f64,
    l: (i64, i64),
    r: (i64, i64),
    rl: f64,
    rr: f64,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cone {}
impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cone {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub
            .total_cmp(&other.ub)
            .then_with(|| other.l.cmp(&self.l))
            .then_with(|| other.r.cmp(&self.r))
    }
}

/// Kerckhoff's formula evaluated by a best-first Stern–Brocot search over
/// slopes, stopping once the certified gap on the distance is below `gap`.
///
/// For a cone spanned by Farey neighbours `u, v`, the Ext ratio on every
/// direction inside is at most `max(R(u), R(v)) / cos θ`, where `θ` is the
/// angle between `u` and `v` measured in the flat metric of `τ₂`.
pub fn teich_dist_farey(t1: TorusPoint, t2: TorusPoint, gap: f64) -> Result<FareyDistance> {
    const MAX_INTERVALS: usize = 4_000_000;
    let ratio = |v: (i64, i64)| {
        let f = FoliationVector { a: v.0 as f64, b: v.1 as f64 };
        ext_length(f, t1) / ext_length(f, t2)
    };
    let cone = |l: (i64, i64), r: (i64, i64), rl: f64, rr: f64| {
        let hl = t2.holonomy(FoliationVector { a: l.0 as f64, b: l.1 as f64 });
        let hr = t2.holonomy(FoliationVector { a: r.0 as f64, b: r.1 as f64 });
        let cos = (hl * hr.conj()).re / (hl.norm() * hr.norm());
        let ub = if cos > 0.0 { rl.max(rr) / cos } else { f64::INFINITY };
        Cone { ub, l, r, rl, rr }
    };

    let (h, v, nh) = ((1, 0), (0, 1), (-1, 0));
    let (rh, rv) = (ratio(h), ratio(v));
    let (mut best, mut best_slope) = if rh >= rv { (rh, h) } else { (rv, v) };
    let mut heap = BinaryHeap::new();
    heap.push(cone(h, v, rh, rv));
    heap.push(cone(v, nh, rv, rh));
    let mut intervals = 2;

    loop {
        let top = *heap.peek().expect("heap never empties");
        let upper = 0.5 * libm::log(top.ub);
        let lower = 0.5 * libm::log(best);
        if upper - lower <= gap {
            let best = Slope::canonicalize(best_slope.0, best_slope.1)?;
            return Ok(FareyDistance { distance: lower, upper_bound: upper, best, intervals });
        }
        if intervals >= MAX_INTERVALS {
            return Err(Error::NumericalFailure { what: "teich_dist_farey", residual: upper - lower });
        }
        heap.pop();
        let m = (top.l.0 + top.r.0, top.l.1 + top.r.1);
        let rm = ratio(m);
        if rm > best {
            best = rm;
            best_slope = m;
        }
        heap.push(cone(top.l, m, top.rl, rm));
        heap.push(cone(m, top.r, rm, top.rr));
        intervals += 2;
    }
}

/// Time-`t` earthquake along the measured foliation `mu`.
///
/// Each holonomy is sheared along the unit direction `u` of `mu`:
/// `h(β) ↦ h(β) + t·det(μ, β)·u`. For `μ = c·α` this is conjugate, by a
/// real normalizing matrix, to `τ̃ ↦ τ̃ + t·c·√(Im τ̃)` in the marking where
/// `α = 1/0`; the same formula covers irrational directions.
pub fn earthquake_tau(tau: TorusPoint, mu: FoliationVector, t: f64) -> Result<TorusPoint> {
    let mu = FoliationVector::new(mu.a, mu.b)?;
    if t == 0.0 {
        return Ok(tau);
    }
    let hm = tau.holonomy(mu);
    let u = hm / hm.norm();
    let h1 = tau.holonomy(FoliationVector { a: 1.0, b: 0.0 }) - u * (t * mu.b);
    let h2 = tau.holonomy(FoliationVector { a: 0.0, b: 1.0 }) + u * (t * mu.a);
    TorusPoint::from_complex(h2 / h1)
}

/// Earthquake along the weighted curve `weight·α`, computed by re-marking so
/// that `α` becomes `1/0`, shifting, and re-marking back.
pub fn earthquake_tau_weighted(tau: TorusPoint, alpha: Slope, weight: f64, t: f64) -> Result<TorusPoint> {
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::InvalidFoliation);
    }
    let n = MappingClass::sending_horizontal_to(alpha);
    let normal = act_tau(n, tau);
    let shifted = TorusPoint { x: normal.x + t * weight * libm::sqrt(normal.y), y: normal.y };
    Ok(act_tau(n.inverse(), shifted))
}

/// `Ext_β(T_α^n · τ) / n²`, which tends to `Ext_α(τ)·i(α, β)²`.
pub fn converge_ratio(tau: TorusPoint, alpha: Slope, beta: Slope, n: u32) -> f64 {
    let twisted = act_tau(twist_matrix(alpha, n as i64), tau);
    let n = n as f64;
    ext_length(beta.as_foliation(), twisted) / (n * n)
}

/// Checks `e^{−2d} Ext_β(τ₁) ≤ Ext_β(τ₂) ≤ e^{2d} Ext_β(τ₁)` on `fam`,
/// `d = teich_dist(τ₁, τ₂)`, up to a relative round-off slack of `1e-12`.
pub fn kerckhoff_bound_check(t1: TorusPoint, t2: TorusPoint, fam: &CurveFamily) -> bool {
    const SLACK: f64 = 1e-12;
    let k = libm::exp(2.0 * teich_dist(t1, t2));
    fam.iter().all(|s| {
        let e1 = ext_length(s.as_foliation(), t1);
        let e2 = ext_length(s.as_foliation(), t2);
        e2 >= e1 / k * (1.0 - SLACK) && e2 <= e1 * k * (1.0 + SLACK)
    })
}
