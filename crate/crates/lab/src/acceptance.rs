//! The acceptance suite: eleven numbered criteria with pinned tolerances,
//! oracles independent of the library code paths they check, and runtime
//! budgets.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichflow::boundary::{angle_dist, detect_limit, epsilon_ratio, foliation_vec, gm_vec, proj_dist, quasiconvex_k};
use teichflow::flow::{
    build_schedule, convergence_report, Backend, BasePoint, Direction, FlowConfig, FlowKind, Schedule, Tolerances,
};
use teichflow::ptorus::{eq_twist_detailed, hyp_length, thurston_vec};
use teichflow::qd::{accumulation_orthogonality, current_bounds, horocycle_step, pairing_h, MarkedQuadDiff};
use teichflow::slopes::farey_family;
use teichflow::torus::{converge_ratio, earthquake_tau, ext_length, kerckhoff_bound_check, teich_dist, teich_dist_farey};
use teichflow::{Error, FlowTrace, FoliationVector, MarkovTriple, Slope, TorusPoint};

use crate::csv_io::{read_trace, trace_to_string};
use crate::error::LabResult;
use crate::parallel::run_flow_parallel;
use crate::plot::render_svg;
use crate::report::report_to_string;

/// Seed for every randomized criterion.
pub const SEED: u64 = 0x7e1c_4f10;
/// Default tolerance on the ε-ratio limit.
pub const EPS_TOL: f64 = 1e-2;

pub const PHI: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub eps_tol: f64,
    /// Worker count for flow sampling (`None`: rayon default).
    pub threads: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { eps_tol: EPS_TOL, threads: None }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub checks_pass: bool,
    pub elapsed: Duration,
    pub budget: Duration,
    pub detail: String,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks_pass && self.elapsed <= self.budget
    }

    /// One table row.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<4} {:<40} {:>9.3} ms (budget {} ms)  {}",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64() * 1e3,
            self.budget.as_millis(),
            self.detail
        )
    }
}

type Check = fn(&Settings) -> LabResult<(bool, String)>;

pub const CRITERIA: [(u32, &str, u64, Check); 11] = [
    (1, "twist limit of extremal length", 1, c1_converge),
    (2, "earthquake limit, simple closed", 1000, c2_simple_earthquake),
    (3, "earthquake limit, golden direction", 5000, c3_golden_earthquake),
    (4, "punctured-torus twist calibration", 1000, c4_ptorus_calibration),
    (5, "punctured-torus length limit", 1000, c5_ptorus_limit),
    (6, "horocycle invariants", 1000, c6_horocycle_invariants),
    (7, "horocycle sandwich and current limit", 5000, c7_current_limit),
    (8, "horocycle limit orthogonality", 5000, c8_orthogonality),
    (9, "Farey distance cross-check", 5000, c9_distance),
    (10, "quasiconvexity constant", 5000, c10_quasiconvex),
    (11, "artifact determinism", 60000, c11_determinism),
];

pub fn run_one(id: u32, settings: &Settings) -> Outcome {
    let (id, title, budget_ms, check) = CRITERIA[(id - 1) as usize];
    let start = Instant::now();
    let (checks_pass, detail) = match check(settings) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title, checks_pass, elapsed: start.elapsed(), budget: Duration::from_millis(budget_ms), detail }
}

pub fn run_all(settings: &Settings) -> Vec<Outcome> {
    (1..=CRITERIA.len() as u32).map(|id| run_one(id, settings)).collect()
}

fn s(p: i64, q: i64) -> Slope {
    Slope::canonicalize(p, q).expect("nonzero")
}

fn geometric(t0: f64, decade_steps: u32, decades: u32) -> Schedule {
    Schedule { t0, ratio: 10f64.powf(1.0 / decade_steps as f64), count: (decade_steps * decades + 1) as usize }
}

pub fn torus_earthquake_config() -> FlowConfig {
    FlowConfig {
        backend: Backend::Torus,
        flow: FlowKind::Earthquake,
        base: BasePoint::Torus(TorusPoint::I),
        direction: Some(Direction::Slope(s(1, 0))),
        depth: 4,
        schedule: geometric(1.0, 4, 3),
        tolerances: Tolerances { limit_tol: 1e-2, window: 3 },
    }
}

pub fn golden_earthquake_config() -> FlowConfig {
    FlowConfig {
        direction: Some(Direction::Vector { a: 1.0, b: PHI }),
        schedule: geometric(1.0, 4, 4),
        ..torus_earthquake_config()
    }
}

pub fn ptorus_earthquake_config() -> FlowConfig {
    FlowConfig {
        backend: Backend::Ptorus,
        base: BasePoint::Markov(MarkovTriple { x: 3.0, y: 3.0, z: 3.0 }),
        schedule: geometric(1.0, 10, 3),
        ..torus_earthquake_config()
    }
}

pub fn horocycle_config(q: MarkedQuadDiff, decades: u32) -> FlowConfig {
    FlowConfig {
        flow: FlowKind::Horocycle,
        base: BasePoint::Quad(q),
        direction: None,
        schedule: geometric(1.0, 10, decades),
        tolerances: Tolerances { limit_tol: 1e-3, window: 3 },
        ..torus_earthquake_config()
    }
}

/// Square torus rotated so that its invariant foliation has slope `1/φ`.
pub fn golden_quad() -> MarkedQuadDiff {
    let theta = (1.0 / PHI).atan();
    MarkedQuadDiff::SQUARE.rotate(-theta)
}

/// Unit-area differentials `dz²` on `τ` in the standard fundamental domain
/// (`Im τ ≤ 2`), rotated by a uniform angle.
pub fn random_quads(n: usize, seed: u64) -> Vec<MarkedQuadDiff> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: f64 = rng.gen_range(-0.5..0.5);
            let y: f64 = rng.gen_range((1.0 - x * x).sqrt()..2.0);
            let th: f64 = rng.gen_range(0.0..2.0 * PI);
            MarkedQuadDiff::from_torus_point(TorusPoint { x, y }).rotate(th)
        })
        .collect()
}

fn target_for(trace: &FlowTrace, mu: FoliationVector) -> LabResult<teichflow::ProjectiveVector> {
    Ok(foliation_vec(mu, trace.family())?)
}

// 1. Ext_β(T_α^n i)/n² = (n² + 1)/n² for α = 1/0, β = 0/1.
fn c1_converge(_: &Settings) -> LabResult<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in [10u32, 100, 1000] {
        let r = converge_ratio(TorusPoint::I, s(1, 0), s(0, 1), n);
        let nf = n as f64;
        let exact = (nf * nf + 1.0) / (nf * nf);
        ok &= (r - exact).abs() <= 1e-14 && (r - 1.0).abs() <= 1.1 / (nf * nf);
        worst = worst.max((r - 1.0).abs() * nf * nf);
    }
    Ok((ok, format!("max n²·|ratio − 1| = {worst:.6}")))
}

// 2. Earthquake along 1/0 from i converges to the foliation vector of 1/0.
fn c2_simple_earthquake(st: &Settings) -> LabResult<(bool, String)> {
    let cfg = torus_earthquake_config();
    let trace = run_flow_parallel(&cfg, st.threads)?;
    let target = target_for(&trace, FoliationVector { a: 1.0, b: 0.0 })?;
    let rep = convergence_report(&trace, Some(&target), 1e-2, 3)?;
    let dist = rep.target_distance.unwrap_or(f64::INFINITY);
    let angle = rep.limit.as_ref().map_or(Ok(f64::INFINITY), |l| angle_dist(l, &target))?;
    // ε-ratio limit against i(α,γ)/i(α,β0) with determinants by hand.
    let vs = trace.vectors();
    let eps = epsilon_ratio(&vs, s(0, 1), s(1, 1))?;
    let i = |a: (i64, i64), b: (i64, i64)| (a.0 * b.1 - a.1 * b.0).abs() as f64;
    let expected = i((1, 0), (0, 1)) / i((1, 0), (1, 1));
    let eps_ok = (eps.limit - expected).abs() <= st.eps_tol;
    let degenerate = matches!(epsilon_ratio(&vs, s(0, 1), s(1, 0)), Err(Error::DegenerateDenominator));
    let ok = rep.limit.is_some()
        && dist < 1e-2
        && angle < 1e-2
        && (rep.rate + 1.0).abs() <= 0.2
        && eps_ok
        && degenerate
        && trace.diagnostics_ok();
    Ok((
        ok,
        format!(
            "dist {dist:.3e}, angle {angle:.3e}, rate {:.4}, eps {:.6} (tol {:.0e}), degenerate β0 flagged {degenerate}",
            rep.rate, eps.limit, st.eps_tol
        ),
    ))
}

/// Earthquake of time `t` from `i` along `(1/p)·(p, q)`, by re-marking `α`
/// to `1/0`, shifting by `t·c·√Im`, and re-marking back; at `τ = i` the
/// integer matrices cancel to this closed form.
fn rational_oracle(p: i64, q: i64, t: f64) -> TorusPoint {
    let d = ((p as f64) * (p as f64) + (q as f64) * (q as f64)).sqrt();
    let delta = t / (p as f64) / d;
    let h = Complex64::new(p as f64, q as f64);
    let z = (Complex64::i() + h * (p as f64 * delta)) / (Complex64::new(1.0, 0.0) - h * (q as f64 * delta));
    TorusPoint { x: z.re, y: z.im }
}

// 3. Earthquake along the golden direction; Fibonacci-convergent oracle.
fn c3_golden_earthquake(st: &Settings) -> LabResult<(bool, String)> {
    let cfg = golden_earthquake_config();
    let trace = run_flow_parallel(&cfg, st.threads)?;
    let mu = FoliationVector { a: 1.0, b: PHI };
    let target = target_for(&trace, mu)?;
    let rep = convergence_report(&trace, Some(&target), 1e-2, 3)?;
    let dist = rep.target_distance.unwrap_or(f64::INFINITY);
    let last = trace.samples().last().expect("nonempty");
    let t_end = last.t;
    let endpoint = last.point.tau().expect("torus point");
    let (mut a, mut b) = (1i64, 1i64);
    let mut errs = Vec::new();
    while a < 100_000_000 {
        let oracle = rational_oracle(a, b, t_end);
        errs.push(proj_dist(&gm_vec(oracle, trace.family()), &last.normalized)?);
        (a, b) = (b, a + b);
    }
    let tail_ok = errs[errs.len() - 4..].iter().all(|e| *e <= 1e-6);
    let refining = errs.windows(2).rev().take(8).all(|w| w[1] <= w[0] || w[1] <= 1e-12);
    let tau_gap = {
        let o = rational_oracle(a, b, t_end);
        ((o.x - endpoint.x).powi(2) + (o.y - endpoint.y).powi(2)).sqrt() / (1.0 + endpoint.x.abs())
    };
    let tau_ok = tau_gap <= 1e-6;
    let ok = rep.limit.is_some() && dist < 1e-2 && tail_ok && refining && tau_ok && trace.diagnostics_ok();
    Ok((
        ok,
        format!(
            "dist {dist:.3e} at t = {t_end:.0}, oracle gap {:.3e} (convergent {a}/{b}), tail {tail_ok}, refining {refining}, τ gap {tau_gap:.2e}, limit {}, diagnostics {}",
            errs.last().unwrap(),
            rep.limit.is_some(),
            trace.diagnostics_ok()
        ),
    ))
}

// 4. Twist by ℓ_α equals one Dehn twist; cusp and Markov relation along the path.
fn c4_ptorus_calibration(_: &Settings) -> LabResult<(bool, String)> {
    let base = MarkovTriple::new(3.0, 3.0, 3.0)?;
    let ell = 2.0 * 1.5f64.acosh();
    let tw = eq_twist_detailed(&base, s(1, 0), ell)?.triple;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let calib = rel(tw.x, 3.0).max(rel(tw.y, 3.0)).max(rel(tw.z, 6.0));
    let schedule = build_schedule(1.0, 10f64.powf(0.05), 61)?;
    let (mut markov, mut cusp, mut drift) = (0.0f64, 0.0f64, 0.0f64);
    for t in schedule {
        let tw = eq_twist_detailed(&base, s(1, 0), t)?;
        markov = markov.max(tw.triple.residual());
        cusp = cusp.max(tw.cusp_residual);
        drift = drift.max(rel(hyp_length(&tw.triple, s(1, 0))?, ell));
    }
    let ok = calib <= 1e-8 && markov <= 1e-9 && cusp <= 1e-9 && drift <= 1e-9;
    Ok((ok, format!("calibration {calib:.2e}, Markov {markov:.2e}, |tr[A,B]+2| {cusp:.2e}, ℓ drift {drift:.2e}")))
}

// 5. Hyperbolic length vectors along the twist converge to i(1/0, ·).
fn c5_ptorus_limit(st: &Settings) -> LabResult<(bool, String)> {
    let cfg = ptorus_earthquake_config();
    let trace = run_flow_parallel(&cfg, st.threads)?;
    let fam = trace.family().clone();
    let last = trace.samples().last().expect("nonempty");
    let raw: Vec<f64> = fam.iter().map(|b| (b.q()).abs() as f64).collect();
    let target = teichflow::ProjectiveVector::from_raw(fam.clone(), raw)?;
    let MarkovTriple { x, y, z } = match last.point {
        teichflow::flow::Point::Markov(m) => m,
        _ => unreachable!("ptorus trace"),
    };
    let direct = thurston_vec(&MarkovTriple { x, y, z }, &fam)?;
    let dist = proj_dist(&direct, &target)?;
    let rep = convergence_report(&trace, Some(&target), 1e-2, 3)?;
    let ok = dist < 1e-2 && rep.limit.is_some() && trace.diagnostics_ok();
    Ok((ok, format!("dist {dist:.3e} at t = {:.0}, max residual {:.2e}", last.t, trace.max_residual())))
}

fn horocycle_times() -> Vec<f64> {
    let mut ts = vec![0.0];
    for k in 0..=16 {
        let t = 10f64.powf(k as f64 / 4.0);
        ts.push(t);
        ts.push(-t);
    }
    ts
}

// 6. Unit area and horizontal pairings are preserved by the horocycle flow.
fn c6_horocycle_invariants(_: &Settings) -> LabResult<(bool, String)> {
    let fam = farey_family(4);
    let (mut area, mut drift) = (0.0f64, 0.0f64);
    for q in random_quads(100, SEED) {
        for t in horocycle_times() {
            let qt = horocycle_step(&q, t);
            area = area.max((qt.area() - 1.0).abs());
            for &sl in &fam {
                drift = drift.max((pairing_h(&qt, sl) - pairing_h(&q, sl)).abs());
            }
        }
    }
    Ok((area <= 1e-12 && drift <= 1e-12, format!("max area residual {area:.2e}, max pairing_h drift {drift:.2e}")))
}

// 7. Sandwich bounds per sample and the limit of L_t/t.
fn c7_current_limit(st: &Settings) -> LabResult<(bool, String)> {
    let mut quads = vec![MarkedQuadDiff::SQUARE];
    quads.extend(random_quads(100, SEED ^ 7));
    let (mut sandwich, mut literal_bad, mut literal_excess, mut sum_bad, mut total) = (0.0f64, 0usize, 0.0f64, 0usize, 0usize);
    let mut worst_dist = 0.0f64;
    let mut missing = 0usize;
    for q in &quads {
        let cfg = horocycle_config(*q, 4);
        let trace = run_flow_parallel(&cfg, st.threads)?;
        for smp in trace.samples() {
            for &sl in trace.family() {
                let b = current_bounds(q, sl, smp.t);
                total += 1;
                // Slack is relative to the length scale of the sample.
                sandwich = sandwich.max(b.sandwich_violation / (1.0 + b.value * smp.t));
                if !b.two_v_bound_holds(smp.t, 1e-12) {
                    literal_bad += 1;
                    literal_excess = literal_excess.max(b.deviation - 2.0 * b.v / smp.t);
                }
                if !b.sum_bound_holds(smp.t, 1e-12) {
                    sum_bad += 1;
                }
            }
        }
        let det = detect_limit(&trace.times(), &trace.vectors(), 1e-3, 3)?;
        let target = foliation_vec(q.invariant_foliation(), trace.family())?;
        match det.limit {
            Some(l) => worst_dist = worst_dist.max(proj_dist(&l, &target)?),
            None => missing += 1,
        }
    }
    let ok = sandwich <= 1e-12 && literal_bad == 0 && missing == 0 && worst_dist < 1e-3;
    Ok((
        ok,
        format!(
            "sandwich slack {sandwich:.1e}; |L/t-h| <= 2v/t fails on {literal_bad}/{total} samples (max excess {literal_excess:.2e}); \
             (v+h)/t bound fails on {sum_bad}; limit dist {worst_dist:.2e}, undetected {missing}"
        ),
    ))
}

// 8. Detected horocycle limits have zero intersection with the invariant foliation.
fn c8_orthogonality(_: &Settings) -> LabResult<(bool, String)> {
    let fam = farey_family(4);
    let schedule = build_schedule(1.0, 10f64.sqrt(), 17)?;
    let rational = accumulation_orthogonality(&MarkedQuadDiff::SQUARE, &fam, &schedule, 1e-3, 3)?;
    let golden = accumulation_orthogonality(&golden_quad(), &fam, &schedule, 1e-3, 3)?;
    // Golden invariant direction is (cos θ, sin θ) with cot θ = φ.
    let eta = golden_quad().invariant_foliation();
    let golden_dir_ok = (eta.b / eta.a - 1.0 / PHI).abs() < 1e-12;
    let ok = rational.orthogonality <= 1e-6 && golden.orthogonality <= 1e-6 && golden_dir_ok;
    Ok((
        ok,
        format!(
            "rational {:.2e} (limit dist {:.1e}), golden {:.2e} (limit dist {:.1e})",
            rational.orthogonality, rational.invariant_distance, golden.orthogonality, golden.invariant_distance
        ),
    ))
}

// 9. Farey-search distance agrees with the closed form; Kerckhoff bound.
fn c9_distance(_: &Settings) -> LabResult<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let fam = farey_family(5);
    let (mut worst, mut kerckhoff_ok, mut n) = (0.0f64, true, 0);
    while n < 100 {
        let a = TorusPoint { x: rng.gen_range(-1.0..1.0), y: rng.gen_range(0.3..3.0) };
        let b = TorusPoint { x: rng.gen_range(-1.0..1.0), y: rng.gen_range(0.3..3.0) };
        // Closed form written out independently of the library.
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let closed = 0.5 * (1.0 + (dx * dx + dy * dy) / (2.0 * a.y * b.y)).acosh();
        if !(closed > 0.0 && closed <= 2.0) {
            continue;
        }
        n += 1;
        let f = teich_dist_farey(a, b, 1e-12)?;
        worst = worst.max((f.distance - closed).abs() / closed);
        worst = worst.max((teich_dist(a, b) - closed).abs() / closed);
        kerckhoff_ok &= kerckhoff_bound_check(a, b, &fam);
    }
    Ok((worst <= 1e-6 && kerckhoff_ok, format!("max relative error {worst:.2e}, Kerckhoff bound {kerckhoff_ok}")))
}

fn brute_force_k(samples: &[(f64, f64)]) -> f64 {
    let mut k = 1.0f64;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            for l in j + 1..samples.len() {
                k = k.max(samples[j].1 / samples[i].1.max(samples[l].1));
            }
        }
    }
    k
}

// 10. Quasiconvexity constant of extremal length along earthquakes.
fn c10_quasiconvex(_: &Settings) -> LabResult<(bool, String)> {
    let along = |gamma: FoliationVector, mu: FoliationVector, n: usize| -> LabResult<Vec<(f64, f64)>> {
        (0..n)
            .map(|k| {
                let t = -10.0 + 20.0 * k as f64 / (n - 1) as f64;
                Ok((t, ext_length(gamma, earthquake_tau(TorusPoint::I, mu, t)?)))
            })
            .collect()
    };
    let e1 = FoliationVector { a: 1.0, b: 0.0 };
    let base = along(FoliationVector { a: 0.0, b: 1.0 }, e1, 201)?;
    let k0 = quasiconvex_k(&base)?;
    let oracle_ok = base.iter().all(|(t, f)| (f - (1.0 + t * t)).abs() <= 1e-12 * (1.0 + t * t));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let (mut stable, mut finite, mut worst) = (true, true, 0.0f64);
    for _ in 0..20 {
        let gamma = loop {
            let (p, q) = (rng.gen_range(-20i64..=20), rng.gen_range(-20i64..=20));
            if let Ok(g) = Slope::canonicalize(p, q) {
                break g;
            }
        };
        let th: f64 = rng.gen_range(0.0..PI);
        let mu = FoliationVector { a: th.cos(), b: th.sin() };
        let coarse = along(gamma.into(), mu, 100)?;
        let fine = along(gamma.into(), mu, 200)?;
        let (kc, kf) = (quasiconvex_k(&coarse)?, quasiconvex_k(&fine)?);
        finite &= kc.is_finite() && kf.is_finite() && (kc - brute_force_k(&coarse)).abs() <= 1e-12 * kc;
        let change = (kf - kc).abs() / kc;
        worst = worst.max(change);
        stable &= change <= 0.05;
    }
    let ok = (k0 - 1.0).abs() <= 1e-9 && oracle_ok && finite && stable;
    Ok((ok, format!("K(1+t²) = {k0}, max relative change under refinement {worst:.2e}")))
}

/// Named artifact files of the acceptance runs (trace CSV, report JSON and
/// plot SVG per run).
pub fn artifacts(threads: Option<usize>) -> LabResult<BTreeMap<String, Vec<u8>>> {
    let runs: Vec<(&str, FlowConfig, FoliationVector)> = vec![
        ("torus_earthquake", torus_earthquake_config(), FoliationVector { a: 1.0, b: 0.0 }),
        ("golden_earthquake", golden_earthquake_config(), FoliationVector { a: 1.0, b: PHI }),
        ("ptorus_earthquake", ptorus_earthquake_config(), FoliationVector { a: 1.0, b: 0.0 }),
        (
            "horocycle_square",
            horocycle_config(MarkedQuadDiff::SQUARE, 4),
            MarkedQuadDiff::SQUARE.invariant_foliation(),
        ),
        ("horocycle_golden", horocycle_config(golden_quad(), 4), golden_quad().invariant_foliation()),
    ];
    let mut out = BTreeMap::new();
    for (name, cfg, mu) in runs {
        let trace = run_flow_parallel(&cfg, threads)?;
        let target = target_for(&trace, mu)?;
        let rep = convergence_report(&trace, Some(&target), cfg.tolerances.limit_tol, cfg.tolerances.window)?;
        let csv = trace_to_string(&trace)?;
        let svg = render_svg(&read_trace(csv.as_bytes())?)?;
        out.insert(format!("{name}.csv"), csv.into_bytes());
        out.insert(format!("{name}.json"), report_to_string(&rep).into_bytes());
        out.insert(format!("{name}.svg"), svg.into_bytes());
    }
    Ok(out)
}

// 11. Artifacts are byte-identical across runs and worker counts.
fn c11_determinism(st: &Settings) -> LabResult<(bool, String)> {
    let a = artifacts(Some(1))?;
    let b = artifacts(Some(4))?;
    let c = artifacts(st.threads)?;
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k) || a.get(*k) != c.get(*k)).collect();
    Ok((differing.is_empty() && a.len() == b.len(), format!("{} artifacts, differing: {differing:?}", a.len())))
}
