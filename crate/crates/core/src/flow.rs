//! Flow configuration, sampled trajectories and convergence reports.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::boundary::{detect_limit, proj_dist, quasiconvex_k, ProjectiveVector};
use crate::error::{Error, Result};
use crate::ptorus::{eq_twist_detailed, hyp_length, MarkovTriple};
use crate::qd::{flat_length, geodesic_step, horocycle_step, pairing_h, pairing_v, project_tau, MarkedQuadDiff};
use crate::slopes::{farey_family, intersection, CurveFamily, FoliationVector, Slope};
use crate::torus::{earthquake_tau, ext_length, TorusPoint};

/// Largest accepted family depth (the family has `2^(depth+1) + 1` slopes).
pub const MAX_DEPTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Backend {
    Torus,
    Ptorus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FlowKind {
    Earthquake,
    Horocycle,
    Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BasePoint {
    Torus(TorusPoint),
    Markov(MarkovTriple),
    Quad(MarkedQuadDiff),
}

/// Earthquake direction: a slope, a weighted slope, or a measured foliation
/// given by its vector.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum Direction {
    Slope(Slope),
    Weighted { slope: Slope, weight: f64 },
    Vector { a: f64, b: f64 },
}

impl Direction {
    pub fn foliation(&self) -> Result<FoliationVector> {
        match *self {
            Direction::Slope(s) => Ok(s.into()),
            Direction::Weighted { slope, weight } => FoliationVector::weighted(slope, weight),
            Direction::Vector { a, b } => FoliationVector::new(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub t0: f64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Tolerances {
    pub limit_tol: f64,
    pub window: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { limit_tol: 1e-2, window: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowConfig {
    pub backend: Backend,
    pub flow: FlowKind,
    pub base: BasePoint,
    #[cfg_attr(feature = "serde", serde(default))]
    pub direction: Option<Direction>,
    pub depth: u32,
    pub schedule: Schedule,
    #[cfg_attr(feature = "serde", serde(default))]
    pub tolerances: Tolerances,
}

/// Geometric grid `t0·ratio^k`, `k < count`.
pub fn build_schedule(t0: f64, ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::ConfigError("t0 must be positive".into()));
    }
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::ConfigError("ratio must exceed 1".into()));
    }
    if count < 2 {
        return Err(Error::ConfigError("count must be at least 2".into()));
    }
    let ts: Vec<f64> = (0..count).map(|k| t0 * libm::pow(ratio, k as f64)).collect();
    if ts.iter().any(|t| !t.is_finite()) || ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ConfigError("schedule overflows or is not strictly increasing".into()));
    }
    Ok(ts)
}

/// State of the flow at one sampled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Torus(TorusPoint),
    Markov(MarkovTriple),
    Quad(MarkedQuadDiff),
}

impl Point {
    /// Underlying torus modulus, if the model has one.
    pub fn tau(&self) -> Option<TorusPoint> {
        match self {
            Point::Torus(t) => Some(*t),
            Point::Quad(q) => Some(project_tau(q)),
            Point::Markov(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub point: Point,
    /// Length functional per family slope: `√Ext` (torus earthquake),
    /// hyperbolic length (punctured torus), `L_t/|t|` (horocycle) or flat
    /// length (geodesic).
    pub raw: Vec<f64>,
    pub normalized: ProjectiveVector,
    /// Largest model-invariant violation at this sample.
    pub residual: f64,
}

/// Per-sample residual bound for each model.
pub fn residual_tolerance(backend: Backend, kind: FlowKind) -> f64 {
    match (backend, kind) {
        (Backend::Ptorus, _) => 1e-9,
        (Backend::Torus, FlowKind::Earthquake) => 1e-9,
        (Backend::Torus, _) => 1e-12,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    backend: Backend,
    kind: FlowKind,
    family: CurveFamily,
    direction: Option<FoliationVector>,
    samples: Vec<Sample>,
}

impl FlowTrace {
    pub fn new(
        backend: Backend,
        kind: FlowKind,
        family: CurveFamily,
        direction: Option<FoliationVector>,
        samples: Vec<Sample>,
    ) -> Result<FlowTrace> {
        if samples.windows(2).any(|w| !(w[0].t < w[1].t)) {
            return Err(Error::ConfigError("sample times must be strictly increasing".into()));
        }
        if samples.iter().any(|s| s.raw.len() != family.len() || s.normalized.family() != &family) {
            return Err(Error::FamilyError);
        }
        Ok(FlowTrace { backend, kind, family, direction, samples })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn direction(&self) -> Option<FoliationVector> {
        self.direction
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn vectors(&self) -> Vec<ProjectiveVector> {
        self.samples.iter().map(|s| s.normalized.clone()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    /// True if every sample is within its model's residual tolerance.
    pub fn diagnostics_ok(&self) -> bool {
        self.max_residual() <= residual_tolerance(self.backend, self.kind)
    }
}

#[derive(Debug, Clone, Copy)]
enum Model {
    TorusQuake { tau: TorusPoint, mu: FoliationVector, ext0: f64 },
    PtorusQuake { triple: MarkovTriple, alpha: Slope, weight: f64, ell0: f64 },
    Horocycle { q: MarkedQuadDiff },
    Geodesic { q: MarkedQuadDiff },
}

/// A validated flow ready to be sampled at arbitrary times.
///
/// Samples are independent of each other, so callers may evaluate them in
/// any order (or concurrently) and hand them to [`PreparedFlow::assemble`].
#[derive(Debug, Clone)]
pub struct PreparedFlow {
    backend: Backend,
    kind: FlowKind,
    family: CurveFamily,
    direction: Option<FoliationVector>,
    model: Model,
}

impl PreparedFlow {
    pub fn new(cfg: &FlowConfig) -> Result<PreparedFlow> {
        if cfg.depth > MAX_DEPTH {
            return Err(Error::ConfigError("family depth too large".into()));
        }
        let family = farey_family(cfg.depth);
        let quad = |base: &BasePoint| match *base {
            BasePoint::Quad(q) => Ok(q),
            BasePoint::Torus(t) => Ok(MarkedQuadDiff::from_torus_point(t)),
            BasePoint::Markov(_) => Err(Error::ConfigError("flat flows need a torus or quad base".into())),
        };
        let direction = cfg.direction.map(|d| d.foliation()).transpose()?;
        let model = match (cfg.backend, cfg.flow) {
            (Backend::Torus, FlowKind::Earthquake) => {
                let mu = direction.ok_or_else(|| Error::ConfigError("earthquake needs a direction".into()))?;
                let tau = match cfg.base {
                    BasePoint::Torus(t) => t,
                    BasePoint::Quad(q) => project_tau(&q),
                    BasePoint::Markov(_) => {
                        return Err(Error::ConfigError("torus backend needs a torus base".into()))
                    }
                };
                Model::TorusQuake { tau, mu, ext0: ext_length(mu, tau) }
            }
            (Backend::Ptorus, FlowKind::Earthquake) => {
                let BasePoint::Markov(triple) = cfg.base else {
                    return Err(Error::ConfigError("ptorus backend needs a Markov triple base".into()));
                };
                triple.validate()?;
                let (alpha, weight) = match cfg.direction {
                    Some(Direction::Slope(s)) => (s, 1.0),
                    Some(Direction::Weighted { slope, weight }) => (slope, weight),
                    Some(Direction::Vector { .. }) => {
                        return Err(Error::ConfigError("ptorus earthquakes need a (weighted) slope".into()))
                    }
                    None => return Err(Error::ConfigError("earthquake needs a direction".into())),
                };
                let ell0 = hyp_length(&triple, alpha)?;
                Model::PtorusQuake { triple, alpha, weight, ell0 }
            }
            (Backend::Torus, FlowKind::Horocycle) => Model::Horocycle { q: quad(&cfg.base)? },
            (Backend::Torus, FlowKind::Geodesic) => Model::Geodesic { q: quad(&cfg.base)? },
            (Backend::Ptorus, k) => {
                return Err(Error::ConfigError(
                    alloc::format!("{k:?} flow requires the torus backend").to_lowercase(),
                ))
            }
        };
        let direction = if matches!(cfg.flow, FlowKind::Earthquake) { direction } else { None };
        Ok(PreparedFlow { backend: cfg.backend, kind: cfg.flow, family, direction, model })
    }

    pub fn horocycle(q: MarkedQuadDiff, family: CurveFamily) -> PreparedFlow {
        PreparedFlow {
            backend: Backend::Torus,
            kind: FlowKind::Horocycle,
            family,
            direction: None,
            model: Model::Horocycle { q },
        }
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    /// Evaluates the flow at time `t`; errors carry `t`.
    pub fn sample(&self, t: f64) -> Result<Sample> {
        self.sample_inner(t).map_err(|e| e.at(t))
    }

    fn sample_inner(&self, t: f64) -> Result<Sample> {
        let fam = &self.family;
        let (point, raw, residual) = match self.model {
            Model::TorusQuake { tau, mu, ext0 } => {
                let tt = earthquake_tau(tau, mu, t)?;
                let raw: Vec<f64> = fam.iter().map(|&s| libm::sqrt(ext_length(s.into(), tt))).collect();
                // Drift of Ext_μ scaled by the conditioning of |a + bτ|, so
                // rounding in τ near the real axis is not counted.
                let drift = libm::fabs(ext_length(mu, tt) - ext0) / ext0;
                let size = libm::fabs(mu.a) + libm::fabs(mu.b) * libm::hypot(tt.x, tt.y);
                let cond = libm::hypot(mu.a + mu.b * tt.x, mu.b * tt.y) / size;
                let res = drift * cond.min(1.0);
                (Point::Torus(tt), raw, res)
            }
            Model::PtorusQuake { triple, alpha, weight, ell0 } => {
                let tw = eq_twist_detailed(&triple, alpha, t * weight)?;
                let raw = fam.iter().map(|&s| hyp_length(&tw.triple, s)).collect::<Result<Vec<_>>>()?;
                let drift = libm::fabs(hyp_length(&tw.triple, alpha)? - ell0) / ell0;
                let res = tw.triple.residual().max(tw.cusp_residual).max(drift);
                (Point::Markov(tw.triple), raw, res)
            }
            Model::Horocycle { q } => {
                let qt = horocycle_step(&q, t);
                let scale = if t == 0.0 { 1.0 } else { libm::fabs(t) };
                let mut worst = libm::fabs(qt.area() - 1.0);
                let mut raw = Vec::with_capacity(fam.len());
                for &s in fam {
                    let l = flat_length(&qt, s);
                    let (v, h) = (pairing_v(&qt, s), pairing_h(&qt, s));
                    worst = worst.max(v.max(h) - l).max(l - (v + h));
                    raw.push(l / scale);
                }
                (Point::Quad(qt), raw, worst.max(0.0))
            }
            Model::Geodesic { q } => {
                let qt = geodesic_step(&q, t);
                let raw = fam.iter().map(|&s| flat_length(&qt, s)).collect();
                (Point::Quad(qt), raw, libm::fabs(qt.area() - 1.0))
            }
        };
        let normalized = ProjectiveVector::from_raw(fam.clone(), raw.clone())?;
        Ok(Sample { t, point, raw, normalized, residual })
    }

    /// Orders samples by time and wraps them in a trace.
    pub fn assemble(&self, mut samples: Vec<Sample>) -> Result<FlowTrace> {
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        FlowTrace::new(self.backend, self.kind, self.family.clone(), self.direction, samples)
    }

    pub fn run(&self, schedule: &[f64]) -> Result<FlowTrace> {
        if schedule.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::ConfigError("schedule must be strictly increasing".into()));
        }
        let samples = schedule.iter().map(|&t| self.sample(t)).collect::<Result<Vec<_>>>()?;
        self.assemble(samples)
    }
}

/// Runs the configured flow over its schedule.
pub fn run_flow(cfg: &FlowConfig) -> Result<FlowTrace> {
    let s = cfg.schedule;
    let schedule = build_schedule(s.t0, s.ratio, s.count)?;
    PreparedFlow::new(cfg)?.run(&schedule)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub limit: Option<ProjectiveVector>,
    pub rate: f64,
    pub tol: f64,
    pub window: usize,
    /// Largest per-slope quasiconvexity constant of the raw functionals.
    pub k: f64,
    pub target_distance: Option<f64>,
    pub pass: bool,
    /// Empirical two-sided constant of the linear-growth estimate, for
    /// earthquake traces.
    pub c_hat: Option<f64>,
    pub max_residual: f64,
}

/// Limit detection plus target comparison and growth constants.
pub fn convergence_report(
    trace: &FlowTrace,
    target: Option<&ProjectiveVector>,
    tol: f64,
    window: usize,
) -> Result<Report> {
    let det = detect_limit(&trace.times(), &trace.vectors(), tol, window)?;
    let target_distance = match (&det.limit, target) {
        (Some(l), Some(t)) => Some(proj_dist(l, t)?),
        _ => None,
    };
    let pass = det.limit.is_some() && target_distance.map_or(target.is_none(), |d| d < tol);
    Ok(Report {
        limit: det.limit,
        rate: det.rate,
        tol,
        window,
        k: quasiconvexity(trace),
        target_distance,
        pass,
        c_hat: growth_constant(trace),
        max_residual: trace.max_residual(),
    })
}

fn quasiconvexity(trace: &FlowTrace) -> f64 {
    let mut k = f64::NAN;
    for i in 0..trace.family.len() {
        let pts: Vec<(f64, f64)> = trace.samples.iter().map(|s| (s.t, s.raw[i])).collect();
        if let Ok(ki) = quasiconvex_k(&pts) {
            k = if k.is_nan() { ki } else { k.max(ki) };
        }
    }
    k
}

fn growth_constant(trace: &FlowTrace) -> Option<f64> {
    let mu = trace.direction?;
    if trace.kind != FlowKind::Earthquake {
        return None;
    }
    let tail = &trace.samples[trace.samples.len() / 2..];
    let mut c = None::<f64>;
    for smp in tail.iter().filter(|s| s.t > 0.0) {
        for (s, raw) in trace.family.iter().zip(&smp.raw) {
            let i = intersection(mu, (*s).into());
            if i == 0.0 {
                continue;
            }
            let ratio = match trace.backend {
                Backend::Torus => raw * raw / (smp.t * smp.t * i * i),
                Backend::Ptorus => raw / (smp.t * i),
            };
            let r = ratio.max(1.0 / ratio);
            c = Some(c.map_or(r, |c| c.max(r)));
        }
    }
    c
}

impl core::fmt::Display for Backend {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Backend::Torus => "torus",
            Backend::Ptorus => "ptorus",
        })
    }
}

impl core::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "torus" => Ok(Backend::Torus),
            "ptorus" => Ok(Backend::Ptorus),
            _ => Err(Error::ConfigError(alloc::format!("unknown backend {s:?}"))),
        }
    }
}

impl FlowKind {
    pub fn name(&self) -> &'static str {
        match self {
            FlowKind::Earthquake => "earthquake",
            FlowKind::Horocycle => "horocycle",
            FlowKind::Geodesic => "geodesic",
        }
    }
}

impl Sample {
    pub fn tau_or_nan(&self) -> (f64, f64) {
        self.point.tau().map_or((f64::NAN, f64::NAN), |t| (t.x, t.y))
    }
}

impl Report {
    pub fn k_label(&self) -> alloc::string::String {
        if self.k.is_infinite() {
            "inf".to_string()
        } else {
            alloc::format!("{}", self.k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::foliation_vec;
    use crate::ptorus::MarkovTriple;
    use alloc::vec;

    fn s(p: i64, q: i64) -> Slope {
        Slope::canonicalize(p, q).unwrap()
    }

    fn torus_cfg(schedule: Schedule, depth: u32) -> FlowConfig {
        FlowConfig {
            backend: Backend::Torus,
            flow: FlowKind::Earthquake,
            base: BasePoint::Torus(TorusPoint::I),
            direction: Some(Direction::Slope(s(1, 0))),
            depth,
            schedule,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(build_schedule(1.0, 2.0, 4).unwrap(), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(build_schedule(0.5, 1.5, 3).unwrap(), vec![0.5, 0.75, 1.125]);
        assert!(matches!(build_schedule(1.0, 1.0, 3), Err(Error::ConfigError(_))));
        assert!(matches!(build_schedule(0.0, 2.0, 3), Err(Error::ConfigError(_))));
        assert!(matches!(build_schedule(1.0, 2.0, 1), Err(Error::ConfigError(_))));
    }

    #[test]
    fn torus_earthquake_trace() {
        let cfg = torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 10 }, 2);
        let tr = run_flow(&cfg).unwrap();
        let last = tr.samples().last().unwrap();
        let t = last.t;
        let tau = last.point.tau().unwrap();
        assert!((tau.x - t).abs() < 1e-12 && (tau.y - 1.0).abs() < 1e-12);
        let target = foliation_vec(FoliationVector::new(1.0, 0.0).unwrap(), tr.family()).unwrap();
        assert!(proj_dist(&last.normalized, &target).unwrap() < 1e-2);
        assert!(tr.diagnostics_ok());
        let rep = convergence_report(&tr, Some(&target), 1e-2, 3).unwrap();
        assert!(rep.pass);
        assert!(rep.c_hat.unwrap() < 1.2);
        assert!((rep.k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn horocycle_trace_diagnostics() {
        let cfg = FlowConfig {
            flow: FlowKind::Horocycle,
            direction: None,
            ..torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 12 }, 2)
        };
        let tr = run_flow(&cfg).unwrap();
        assert!(tr.diagnostics_ok());
        assert!(convergence_report(&tr, None, 1e-2, 3).unwrap().c_hat.is_none());
    }

    #[test]
    fn ptorus_trace_residuals() {
        let cfg = FlowConfig {
            backend: Backend::Ptorus,
            base: BasePoint::Markov(MarkovTriple::new(3.0, 3.0, 3.0).unwrap()),
            ..torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 10 }, 2)
        };
        let tr = run_flow(&cfg).unwrap();
        assert!(tr.diagnostics_ok(), "{}", tr.max_residual());
        assert!(tr.samples()[0].tau_or_nan().0.is_nan());
    }

    #[test]
    fn incompatible_configs_are_rejected() {
        let mut cfg = torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 4 }, 2);
        cfg.backend = Backend::Ptorus;
        cfg.flow = FlowKind::Horocycle;
        assert!(matches!(run_flow(&cfg), Err(Error::ConfigError(_))));
        let mut cfg = torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 4 }, 2);
        cfg.direction = None;
        assert!(matches!(run_flow(&cfg), Err(Error::ConfigError(_))));
    }

    #[test]
    fn short_trace_is_insufficient() {
        let tr = run_flow(&torus_cfg(Schedule { t0: 1.0, ratio: 2.0, count: 2 }, 1)).unwrap();
        assert!(matches!(convergence_report(&tr, None, 1e-2, 3), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn degenerate_structure_reports_time() {
        let cfg = FlowConfig {
            backend: Backend::Ptorus,
            base: BasePoint::Markov(MarkovTriple::new(3.0, 3.0, 3.0).unwrap()),
            ..torus_cfg(Schedule { t0: 100.0, ratio: 10.0, count: 3 }, 1)
        };
        match run_flow(&cfg) {
            Err(Error::AtTime { t, .. }) => assert_eq!(t, 10000.0),
            other => panic!("{other:?}"),
        }
    }
}
