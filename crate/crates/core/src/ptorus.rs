//! Complete hyperbolic structures on the once-punctured torus in Markov trace
//! coordinates.
//!
//! A marked structure is the triple `(x, y, z) = (tr A, tr B, tr AB)` of a
//! Fuchsian lift, subject to `x² + y² + z² = xyz` (parabolic commutator).
//! Slope `(p, q)` is the simple closed curve in homology class `p[A] + q[B]`.
//!
//! Markings follow the same right-action convention as the torus model:
//! re-marking by `M` produces the structure whose slope `β` has the trace of
//! slope `Mβ` in the original.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::boundary::ProjectiveVector;
use crate::error::{Error, Result};
use crate::slopes::{twist_matrix, CurveFamily, MappingClass, Slope};

/// Markov-relation tolerance, relative to `xyz`.
pub const MARKOV_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarkovTriple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl MarkovTriple {
    pub fn new(x: f64, y: f64, z: f64) -> Result<MarkovTriple> {
        let t = MarkovTriple { x, y, z };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.x.is_finite() && self.y.is_finite() && self.z.is_finite();
        if !finite {
            return Err(Error::NumericalFailure { what: "trace overflow", residual: f64::INFINITY });
        }
        if self.x <= 2.0 || self.y <= 2.0 || self.z <= 2.0 {
            return Err(Error::DegenerateStructure("generator trace ≤ 2"));
        }
        let r = self.residual();
        if r > MARKOV_TOL {
            return Err(Error::NumericalFailure { what: "Markov relation", residual: r });
        }
        Ok(())
    }

    /// `|x² + y² + z² − xyz| / xyz`, evaluated without overflow.
    pub fn residual(&self) -> f64 {
        let (x, y, z) = (self.x, self.y, self.z);
        libm::fabs(x / y / z + y / x / z + z / x / y - 1.0)
    }

    /// Triple of the structure with `A` replaced by `A⁻¹` (slopes `(p,q) ↦ (−p,q)`).
    fn mirrored(&self) -> MarkovTriple {
        let lz = other_root(libm::log(self.x) + libm::log(self.y), log_sum_sq(libm::log(self.x), libm::log(self.y)), libm::log(self.z));
        MarkovTriple { x: self.x, y: self.y, z: libm::exp(lz) }
    }
}

/// Root selector for [`markov_complete`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Minus,
    Plus,
}

/// Completes `(x, y)` to a Markov triple using a root of `z² − xyz + x² + y² = 0`.
pub fn markov_complete(x: f64, y: f64, branch: Branch) -> Result<MarkovTriple> {
    if !(x > 2.0 && y > 2.0) {
        return Err(Error::DegenerateStructure("generator trace ≤ 2"));
    }
    let s = x * y;
    let p = x * x + y * y;
    let disc = s * s - 4.0 * p;
    if disc < 0.0 {
        return Err(Error::NotRealizable { discriminant: disc });
    }
    let plus = 0.5 * (s + libm::sqrt(disc));
    let z = match branch {
        Branch::Plus => plus,
        Branch::Minus => p / plus,
    };
    if z <= 2.0 {
        return Err(Error::DegenerateStructure("completed trace ≤ 2"));
    }
    Ok(MarkovTriple { x, y, z })
}

/// 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `tr(self · rhs)` from the diagonal terms only.
    pub fn trace_mul(&self, rhs: &Mat2) -> f64 {
        self.a * rhs.a + self.b * rhs.c + self.c * rhs.b + self.d * rhs.d
    }
}

impl core::ops::Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

fn commutator_trace(a: &Mat2, b: &Mat2) -> f64 {
    (*a * *b * a.inv()).trace_mul(&b.inv())
}

/// Fuchsian lift `(A, B)` with `A = diag(λ, 1/λ)` and `B` normalized to have
/// lower-left entry 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixLift {
    pub a: Mat2,
    pub b: Mat2,
}

impl MatrixLift {
    /// `tr[A, B] + 2`, zero for a cusped structure.
    pub fn cusp_residual(&self) -> f64 {
        commutator_trace(&self.a, &self.b) + 2.0
    }
}

pub fn lift_matrices(t: &MarkovTriple) -> Result<MatrixLift> {
    let MarkovTriple { x, y, z } = *t;
    if x <= 2.0 {
        return Err(Error::DegenerateStructure("tr A ≤ 2"));
    }
    let lam = 0.5 * (x + libm::sqrt((x - 2.0) * (x + 2.0)));
    let ilam = 1.0 / lam;
    let a = (z - y * ilam) / (lam - ilam);
    let d = y - a;
    let lift = MatrixLift {
        a: Mat2 { a: lam, b: 0.0, c: 0.0, d: ilam },
        b: Mat2 { a, b: a * d - 1.0, c: 1.0, d },
    };
    let scale = 1.0 + libm::fabs(a * d);
    let det_res = libm::fabs(lift.b.det() - 1.0) / scale;
    if !(det_res <= 1e-12) {
        return Err(Error::NumericalFailure { what: "lift det B", residual: det_res });
    }
    let trace_res = rel(lift.a.trace(), x).max(rel(lift.b.trace(), y)).max(rel((lift.a * lift.b).trace(), z));
    if !(trace_res <= 1e-9) {
        return Err(Error::NumericalFailure { what: "lift traces", residual: trace_res });
    }
    let cusp = libm::fabs(lift.cusp_residual()) / (1.0 + libm::fabs(lift.b.b) * (lam - ilam) * (lam - ilam));
    if !(cusp <= 1e-9) {
        return Err(Error::NumericalFailure { what: "lift commutator", residual: cusp });
    }
    Ok(lift)
}

fn rel(a: f64, b: f64) -> f64 {
    libm::fabs(a - b) / libm::fabs(b).max(1.0)
}

fn log_sum_sq(la: f64, lb: f64) -> f64 {
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    2.0 * hi + libm::log1p(libm::exp(2.0 * (lo - hi)))
}

/// Given logs of the sum `S`, product `P` and one root of `s² − S s + P`,
/// returns the log of the other root, avoiding cancellation.
fn other_root(log_sum: f64, log_prod: f64, log_known: f64) -> f64 {
    if log_known >= log_sum - LN_2 {
        log_prod - log_known
    } else {
        log_sum + libm::log1p(-libm::exp(log_known - log_sum))
    }
}

/// Natural log of the trace of the simple closed geodesic of slope `s`.
///
/// Walks the Stern–Brocot tree with the Farey recursion
/// `t(u + v) = t(u)·t(v) − t(u − v)`; since `t(u + v)` and `t(u − v)` are the
/// two roots of `s² − t(u)t(v)s + t(u)² + t(v)²`, whichever root form is
/// stable is used. Working in logs keeps long slopes on degenerating
/// structures finite.
pub fn slope_log_trace(t: &MarkovTriple, s: Slope) -> f64 {
    if s.p() < 0 {
        let m = t.mirrored();
        return slope_log_trace(&m, Slope::canonicalize(-s.p(), s.q()).expect("nonzero"));
    }
    let (lx, ly) = (libm::log(t.x), libm::log(t.y));
    match (s.p(), s.q()) {
        (1, 0) => return lx,
        (0, 1) => return ly,
        _ => {}
    }
    let (p, q) = (s.p(), s.q());
    let (mut l, mut r) = ((0i64, 1i64), (1i64, 0i64));
    let (mut ll, mut lr) = (ly, lx);
    // Trace of L − R = (−1, 1), i.e. tr(A⁻¹B) = xy − z.
    let mut ld = other_root(lx + ly, log_sum_sq(lx, ly), libm::log(t.z));
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        let lm = other_root(ll + lr, log_sum_sq(ll, lr), ld);
        if m == (p, q) {
            return lm;
        }
        if (p as i128) * (m.1 as i128) > (q as i128) * (m.0 as i128) {
            ld = ll;
            l = m;
            ll = lm;
        } else {
            ld = lr;
            r = m;
            lr = lm;
        }
    }
}

/// Trace of the simple closed geodesic of slope `s` (may overflow to `inf`
/// on strongly degenerated structures; use [`slope_log_trace`] there).
pub fn slope_trace(t: &MarkovTriple, s: Slope) -> f64 {
    libm::exp(slope_log_trace(t, s))
}

/// The word of slope `s` in the lift, built by Nielsen moves
/// `W(u + v) = W(v)·W(u)` down the Stern–Brocot tree.
pub fn slope_word(lift: &MatrixLift, s: Slope) -> Mat2 {
    let (ga, gb) = if s.p() < 0 { (lift.a.inv(), lift.b) } else { (lift.a, lift.b) };
    let (p, q) = (s.p().abs(), s.q());
    match (p, q) {
        (1, 0) => return ga,
        (0, 1) => return gb,
        _ => {}
    }
    let (mut l, mut r) = ((0i64, 1i64), (1i64, 0i64));
    let (mut wl, mut wr) = (gb, ga);
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        let wm = wr * wl;
        if m == (p, q) {
            return wm;
        }
        if (p as i128) * (m.1 as i128) > (q as i128) * (m.0 as i128) {
            l = m;
            wl = wm;
        } else {
            r = m;
            wr = wm;
        }
    }
}

/// `2·arccosh(trace/2)`.
pub fn length_from_trace(trace: f64) -> Result<f64> {
    if !(trace > 2.0) {
        return Err(Error::DegenerateStructure("trace ≤ 2 (parabolic or elliptic)"));
    }
    Ok(2.0 * libm::acosh(0.5 * trace))
}

fn length_from_log_trace(lt: f64) -> Result<f64> {
    if lt < 30.0 {
        return length_from_trace(libm::exp(lt));
    }
    let lu = lt - LN_2;
    Ok(2.0 * (lu + libm::log1p(libm::sqrt(1.0 - libm::exp(-2.0 * lu)))))
}

/// Hyperbolic length of the geodesic of slope `s`.
pub fn hyp_length(t: &MarkovTriple, s: Slope) -> Result<f64> {
    length_from_log_trace(slope_log_trace(t, s))
}

/// The structure re-marked by `m`: slope `β` of the result has the trace of
/// slope `mβ` in `t`.
pub fn remark(t: &MarkovTriple, m: MappingClass) -> MarkovTriple {
    let tr = |p: i64, q: i64| {
        let (p, q) = m.apply(p, q);
        slope_trace(t, Slope::canonicalize(p, q).expect("nonzero"))
    };
    MarkovTriple { x: tr(1, 0), y: tr(0, 1), z: tr(1, 1) }
}

/// Trace coordinates after `n` positive Dehn twists about `alpha`.
///
/// For `alpha = 1/0`, `n = 1` this is `(x, y, z) ↦ (x, z, xz − y)`.
pub fn twist_action_triple(t: &MarkovTriple, alpha: Slope, n: i64) -> MarkovTriple {
    if n == 0 {
        return *t;
    }
    remark(t, twist_matrix(alpha, n))
}

/// Result of a Fenchel–Nielsen twist, with the cusp diagnostic of the
/// twisted lift `(A, E_t B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twisted {
    pub triple: MarkovTriple,
    /// `|tr[A, E_t B] + 2|` in the frame where `alpha = 1/0`.
    pub cusp_residual: f64,
}

/// Twist of hyperbolic distance `t` along the geodesic of slope `alpha`.
pub fn eq_twist(t: &MarkovTriple, alpha: Slope, dist: f64) -> Result<MarkovTriple> {
    eq_twist_detailed(t, alpha, dist).map(|tw| tw.triple)
}

pub fn eq_twist_detailed(t: &MarkovTriple, alpha: Slope, dist: f64) -> Result<Twisted> {
    if dist == 0.0 {
        return Ok(Twisted { triple: *t, cusp_residual: 0.0 });
    }
    let n = MappingClass::sending_horizontal_to(alpha);
    let identity = n == MappingClass::IDENTITY;
    let frame = if identity { *t } else { remark(t, n) };
    let lift = lift_matrices(&frame)?;
    let e = libm::exp(0.5 * dist);
    let b = lift.b;
    let eb = Mat2 { a: e * b.a, b: e * b.b, c: b.c / e, d: b.d / e };
    let twisted = MarkovTriple {
        x: frame.x,
        y: eb.trace(),
        z: lift.a.trace_mul(&eb),
    };
    let cusp_residual = libm::fabs(commutator_trace(&lift.a, &eb) + 2.0);
    let out = if identity { twisted } else { remark(&twisted, n.inverse()) };
    out.validate()?;
    Ok(Twisted { triple: out, cusp_residual })
}

/// Sup-normalized hyperbolic lengths over `fam`.
pub fn thurston_vec(t: &MarkovTriple, fam: &CurveFamily) -> Result<ProjectiveVector> {
    let raw = fam.iter().map(|&s| hyp_length(t, s)).collect::<Result<Vec<_>>>()?;
    ProjectiveVector::from_raw(fam.clone(), raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slopes::farey_family;
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::canonicalize(p, q).unwrap()
    }
    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }
    fn triple_close(a: &MarkovTriple, b: &MarkovTriple, tol: f64) -> bool {
        rel_close(a.x, b.x, tol) && rel_close(a.y, b.y, tol) && rel_close(a.z, b.z, tol)
    }
    const MODULAR: MarkovTriple = MarkovTriple { x: 3.0, y: 3.0, z: 3.0 };

    #[test]
    fn markov_complete_examples() {
        let m = markov_complete(3.0, 3.0, Branch::Minus).unwrap();
        assert!(triple_close(&m, &MODULAR, 1e-15));
        let p = markov_complete(3.0, 3.0, Branch::Plus).unwrap();
        assert!(triple_close(&p, &MarkovTriple { x: 3.0, y: 3.0, z: 6.0 }, 1e-15));
        match markov_complete(2.5, 2.5, Branch::Plus) {
            Err(Error::NotRealizable { discriminant }) => {
                assert!((discriminant - (39.0625 - 50.0)).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(markov_complete(2.0, 5.0, Branch::Plus), Err(Error::DegenerateStructure(_))));
    }

    #[test]
    fn triples_are_validated() {
        assert!(MarkovTriple::new(3.0, 3.0, 3.0).is_ok());
        assert!(MarkovTriple::new(3.0, 3.0, 4.0).is_err());
        assert!(MarkovTriple::new(2.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn lift_examples() {
        let lift = lift_matrices(&MODULAR).unwrap();
        assert!(lift.cusp_residual().abs() < 1e-12);
        assert!((lift.a.det() - 1.0).abs() < 1e-12 && (lift.b.det() - 1.0).abs() < 1e-12);
        assert_eq!(lift.b.c, 1.0);
        let t = MarkovTriple::new(3.0, 3.0, 6.0).unwrap();
        let lift = lift_matrices(&t).unwrap();
        assert!(rel_close(lift.a.trace(), 3.0, 1e-9));
        assert!(rel_close(lift.b.trace(), 3.0, 1e-9));
        assert!(rel_close((lift.a * lift.b).trace(), 6.0, 1e-9));
        let deg = MarkovTriple { x: 2.0, y: 3.0, z: 3.0 };
        assert!(matches!(lift_matrices(&deg), Err(Error::DegenerateStructure(_))));
    }

    #[test]
    fn slope_trace_examples() {
        assert!(rel_close(slope_trace(&MODULAR, s(1, 1)), 3.0, 1e-14));
        assert!(rel_close(slope_trace(&MODULAR, s(2, 1)), 6.0, 1e-14));
        assert!(rel_close(slope_trace(&MODULAR, s(1, 2)), 6.0, 1e-14));
        // tr(A⁻¹B) = xy − z.
        assert!(rel_close(slope_trace(&MODULAR, s(-1, 1)), 6.0, 1e-14));
        let t = markov_complete(3.5, 4.0, Branch::Plus).unwrap();
        assert!(rel_close(slope_trace(&t, s(-1, 1)), t.x * t.y - t.z, 1e-12));
    }

    #[test]
    fn hyp_length_examples() {
        assert!((hyp_length(&MODULAR, s(1, 0)).unwrap() - 1.9248473002384139).abs() < 1e-12);
        assert!((hyp_length(&MODULAR, s(2, 1)).unwrap() - 3.5254943480781713).abs() < 1e-12);
        assert!(length_from_trace(2.0).is_err());
        // Large-trace branch agrees with the direct formula where both apply.
        let lt = 31.0f64;
        let direct = 2.0 * (0.5 * lt.exp()).acosh();
        assert!(rel_close(length_from_log_trace(lt).unwrap(), direct, 1e-14));
    }

    #[test]
    fn twist_action_examples() {
        let t = twist_action_triple(&MODULAR, s(1, 0), 1);
        assert!(triple_close(&t, &MarkovTriple { x: 3.0, y: 3.0, z: 6.0 }, 1e-14));
        assert_eq!(twist_action_triple(&MODULAR, s(2, 3), 0), MODULAR);
        let t = markov_complete(3.2, 4.1, Branch::Minus).unwrap();
        let back = twist_action_triple(&twist_action_triple(&t, s(1, 2), 1), s(1, 2), -1);
        assert!(triple_close(&back, &t, 1e-12));
        let general = twist_action_triple(&t, s(1, 0), 1);
        assert!(triple_close(&general, &MarkovTriple { x: t.x, y: t.z, z: t.x * t.z - t.y }, 1e-12));
    }

    #[test]
    fn eq_twist_examples() {
        assert_eq!(eq_twist(&MODULAR, s(1, 0), 0.0).unwrap(), MODULAR);
        let ell = hyp_length(&MODULAR, s(1, 0)).unwrap();
        let t = eq_twist(&MODULAR, s(1, 0), ell).unwrap();
        assert!(triple_close(&t, &MarkovTriple { x: 3.0, y: 3.0, z: 6.0 }, 1e-8));
        let t = eq_twist(&MODULAR, s(1, 0), 0.7).unwrap();
        assert!(rel_close(hyp_length(&t, s(1, 0)).unwrap(), ell, 1e-12));
    }

    #[test]
    fn eq_twist_matches_dehn_twists() {
        let base = markov_complete(3.3, 3.9, Branch::Plus).unwrap();
        for alpha in [s(1, 0), s(0, 1), s(1, 1), s(2, 1), s(-1, 2)] {
            let ell = hyp_length(&base, alpha).unwrap();
            for n in 1..4 {
                let a = eq_twist(&base, alpha, n as f64 * ell).unwrap();
                let b = twist_action_triple(&base, alpha, n);
                assert!(triple_close(&a, &b, 1e-8), "{alpha} n={n}: {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn recursion_matches_matrix_words_to_depth_8() {
        let fam = farey_family(8);
        for base in [
            MODULAR,
            markov_complete(3.0, 3.0, Branch::Plus).unwrap(),
            markov_complete(2.3, 5.0, Branch::Plus).unwrap(),
            markov_complete(4.0, 2.7, Branch::Minus).unwrap(),
        ] {
            let lift = lift_matrices(&base).unwrap();
            for &sl in fam.iter() {
                for sl in [sl, s(-sl.p(), sl.q())] {
                    let rec = slope_trace(&base, sl);
                    let word = slope_word(&lift, sl).trace();
                    assert!(rel_close(rec, word, 1e-8), "{sl}: {rec} vs {word}");
                }
            }
        }
    }

    #[test]
    fn long_twists_stay_cusped() {
        let ell = hyp_length(&MODULAR, s(1, 0)).unwrap();
        for k in 0..=30 {
            let t = 10f64.powf(k as f64 / 10.0);
            let tw = eq_twist_detailed(&MODULAR, s(1, 0), t).unwrap();
            assert!(tw.triple.residual() <= 1e-9);
            assert!(tw.cusp_residual <= 1e-9);
            assert!(rel_close(hyp_length(&tw.triple, s(1, 0)).unwrap(), ell, 1e-9));
        }
    }

    #[test]
    fn thurston_vec_examples() {
        let fam = farey_family(0);
        let v = thurston_vec(&MODULAR, &fam).unwrap();
        for x in v.values() {
            assert!((x - 1.0).abs() < 1e-14);
        }
        let single = CurveFamily::new(alloc::vec![s(3, 5)]).unwrap();
        assert_eq!(thurston_vec(&MODULAR, &single).unwrap().values(), &[1.0]);
        let t = MarkovTriple::new(3.0, 3.0, 6.0).unwrap();
        let v = thurston_vec(&t, &fam).unwrap();
        let (a, b, d) = (v.get(s(1, 0)).unwrap(), v.get(s(0, 1)).unwrap(), v.get(s(1, 1)).unwrap());
        assert_eq!(d, 1.0);
        assert!((a - b).abs() < 1e-15 && a < 1.0);
    }

    proptest! {
        #[test]
        fn twist_flow_law(x in 2.2f64..6.0, y in 2.2f64..6.0, s1 in -3.0f64..3.0, s2 in -3.0f64..3.0) {
            prop_assume!(x * x * y * y >= 4.0 * (x * x + y * y));
            let base = markov_complete(x, y, Branch::Plus).unwrap();
            for alpha in [s(1, 0), s(1, 1), s(-2, 1)] {
                let two = eq_twist(&eq_twist(&base, alpha, s1).unwrap(), alpha, s2).unwrap();
                let one = eq_twist(&base, alpha, s1 + s2).unwrap();
                prop_assert!(triple_close(&two, &one, 1e-8));
                prop_assert!(rel_close(hyp_length(&one, alpha).unwrap(), hyp_length(&base, alpha).unwrap(), 1e-9));
            }
        }

        #[test]
        fn crossing_lengths_grow_linearly(t in 50.0f64..400.0) {
            let alpha = s(1, 0);
            for beta in farey_family(3).iter().filter(|b| b.intersection(alpha) != 0) {
                let l = hyp_length(&eq_twist(&MODULAR, alpha, t).unwrap(), *beta).unwrap();
                let i = beta.intersection(alpha) as f64;
                let r = l / (t * i);
                prop_assert!(r > 0.9 && r < 1.2, "{}: {}", beta, r);
            }
        }
    }
}
