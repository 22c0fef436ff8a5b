//! Projective vectors of length functionals over a finite curve family,
//! limit detection along trajectories, and the quasiconvexity estimator.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::slopes::{intersection, CurveFamily, FoliationVector, Slope};
use crate::torus::{ext_length, TorusPoint};

/// A nonnegative vector indexed by a curve family, sup-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveVector {
    family: CurveFamily,
    values: Vec<f64>,
}

impl ProjectiveVector {
    /// Normalizes `raw` by its largest entry.
    pub fn from_raw(family: CurveFamily, raw: Vec<f64>) -> Result<ProjectiveVector> {
        if raw.len() != family.len() {
            return Err(Error::FamilyError);
        }
        if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::NumericalFailure { what: "length functional", residual: f64::NAN });
        }
        let max = raw.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::ZeroFunctional);
        }
        let values = raw.into_iter().map(|v| v / max).collect();
        Ok(ProjectiveVector { family, values })
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: Slope) -> Option<f64> {
        self.family.position(s).map(|i| self.values[i])
    }
}

/// Gardiner–Masur vector `[√Ext_s(τ)]` over `fam`.
pub fn gm_vec(tau: TorusPoint, fam: &CurveFamily) -> ProjectiveVector {
    let raw = fam.iter().map(|&s| libm::sqrt(ext_length(s.into(), tau))).collect();
    ProjectiveVector::from_raw(fam.clone(), raw).expect("extremal lengths are positive")
}

/// Intersection vector `[i(μ, s)]` over `fam`.
pub fn foliation_vec(mu: FoliationVector, fam: &CurveFamily) -> Result<ProjectiveVector> {
    let raw = fam.iter().map(|&s| intersection(mu, s.into())).collect();
    ProjectiveVector::from_raw(fam.clone(), raw)
}

/// Sup-norm distance of sup-normalized representatives.
pub fn proj_dist(u: &ProjectiveVector, v: &ProjectiveVector) -> Result<f64> {
    if u.family != v.family {
        return Err(Error::FamilyError);
    }
    Ok(u.values.iter().zip(&v.values).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max))
}

/// Angle between the two vectors in radians.
pub fn angle_dist(u: &ProjectiveVector, v: &ProjectiveVector) -> Result<f64> {
    if u.family != v.family {
        return Err(Error::FamilyError);
    }
    let nu = libm::sqrt(u.values.iter().map(|x| x * x).sum::<f64>());
    let nv = libm::sqrt(v.values.iter().map(|x| x * x).sum::<f64>());
    let chord = libm::sqrt(
        u.values.iter().zip(&v.values).map(|(a, b)| (a / nu - b / nv) * (a / nu - b / nv)).sum::<f64>(),
    );
    Ok(2.0 * libm::asin((0.5 * chord).min(1.0)))
}

/// Outcome of windowed-Cauchy limit detection.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitDetection {
    /// Final normalized vector, if the last `window` samples agree within `tol`.
    pub limit: Option<ProjectiveVector>,
    /// Log-log slope of the distance to the final vector (NaN if undetermined).
    pub rate: f64,
}

/// Detects a projective limit from samples `(t_k, v_k)` with increasing `t`.
pub fn detect_limit(ts: &[f64], vs: &[ProjectiveVector], tol: f64, window: usize) -> Result<LimitDetection> {
    if window < 2 {
        return Err(Error::ConfigError("window must be at least 2".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::ConfigError("tolerance must be positive".into()));
    }
    if ts.len() != vs.len() {
        return Err(Error::FamilyError);
    }
    if vs.len() < window {
        return Err(Error::InsufficientData { needed: window, got: vs.len() });
    }
    let tail = &vs[vs.len() - window..];
    let mut converged = true;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            if !(proj_dist(a, b)? < tol) {
                converged = false;
            }
        }
    }
    let last = vs.last().expect("nonempty");
    let rate = convergence_rate(ts, vs, last)?;
    Ok(LimitDetection { limit: converged.then(|| last.clone()), rate })
}

fn convergence_rate(ts: &[f64], vs: &[ProjectiveVector], last: &ProjectiveVector) -> Result<f64> {
    let t_end = *ts.last().expect("nonempty");
    let mut pts = Vec::new();
    for (t, v) in ts.iter().zip(vs) {
        let d = proj_dist(v, last)?;
        if *t > 0.0 && d > 0.0 && *t <= 0.1 * t_end {
            pts.push((libm::log(*t), libm::log(d)));
        }
    }
    if pts.len() < 2 {
        pts.clear();
        for (t, v) in ts.iter().zip(vs).take(ts.len() - 1) {
            let d = proj_dist(v, last)?;
            if *t > 0.0 && d > 0.0 {
                pts.push((libm::log(*t), libm::log(d)));
            }
        }
    }
    Ok(ls_slope(&pts))
}

/// Least-squares slope, NaN with fewer than two distinct abscissae.
pub fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// Entry of `β0` below which the ratio denominator counts as vanished.
pub const EPSILON_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonRatio {
    pub ratios: Vec<f64>,
    /// Last ratio of the sequence.
    pub limit: f64,
    /// Largest deviation from `limit` over the last half of the sequence.
    pub spread: f64,
}

/// Ratio sequence `v_k[γ] / v_k[β0]` along normalized samples.
pub fn epsilon_ratio(vs: &[ProjectiveVector], gamma: Slope, beta0: Slope) -> Result<EpsilonRatio> {
    let first = vs.first().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    let gi = first.family.position(gamma).ok_or(Error::InvalidFamily("slope not in family"))?;
    let bi = first.family.position(beta0).ok_or(Error::InvalidFamily("slope not in family"))?;
    let tail_start = vs.len() / 2;
    if vs[tail_start..].iter().any(|v| v.values[bi] < EPSILON_FLOOR) {
        return Err(Error::DegenerateDenominator);
    }
    let ratios: Vec<f64> = vs.iter().map(|v| v.values[gi] / v.values[bi]).collect();
    let limit = *ratios.last().expect("nonempty");
    let spread = ratios[tail_start..].iter().map(|r| libm::fabs(r - limit)).fold(0.0, f64::max);
    Ok(EpsilonRatio { ratios, limit, spread })
}

/// Smallest `K ≥ 1` with `f(t₂) ≤ K·max(f(t₁), f(t₃))` over all sampled
/// triples `t₁ < t₂ < t₃`.
///
/// For fixed `t₂` the worst triple pairs the smallest earlier value with the
/// smallest later one, so prefix and suffix minima give the exact maximum in
/// linear time.
pub fn quasiconvex_k(samples: &[(f64, f64)]) -> Result<f64> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::ConfigError("sample times must be strictly increasing".into()));
    }
    if samples.iter().any(|s| !(s.1 > 0.0)) {
        return Err(Error::ConfigError("sample values must be positive".into()));
    }
    let mut suffix = alloc::vec![f64::INFINITY; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1].min(samples[j].1);
    }
    let mut prefix = samples[0].1;
    let mut k = 1.0f64;
    for j in 1..n - 1 {
        let f = samples[j].1;
        k = k.max(f / prefix.max(suffix[j + 1]));
        prefix = prefix.min(f);
    }
    Ok(k)
}

/// Foliation whose intersection vector best matches `v` in least squares,
/// as a unit vector `(cos θ, sin θ)`, `θ ∈ [0, π)`.
pub fn fit_direction(v: &ProjectiveVector) -> FoliationVector {
    let obj = |theta: f64| {
        let u = FoliationVector { a: libm::cos(theta), b: libm::sin(theta) };
        let (mut vf, mut ff, mut vv) = (0.0, 0.0, 0.0);
        for (s, x) in v.family.iter().zip(&v.values) {
            let f = intersection(u, (*s).into());
            vf += x * f;
            ff += f * f;
            vv += x * x;
        }
        if ff == 0.0 {
            vv
        } else {
            vv - vf * vf / ff
        }
    };
    const GRID: usize = 4096;
    let h = PI / GRID as f64;
    let best = (0..GRID)
        .map(|k| (k, obj(k as f64 * h)))
        .fold((0, f64::INFINITY), |acc, (k, f)| if f < acc.1 { (k, f) } else { acc });
    let (mut lo, mut hi) = ((best.0 as f64 - 1.0) * h, (best.0 as f64 + 1.0) * h);
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (obj(c), obj(d));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = obj(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = obj(d);
        }
    }
    let mut theta = 0.5 * (lo + hi);
    if theta < 0.0 {
        theta += PI;
    } else if theta >= PI {
        theta -= PI;
    }
    FoliationVector { a: libm::cos(theta), b: libm::sin(theta) }
}
