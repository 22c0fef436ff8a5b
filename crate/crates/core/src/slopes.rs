//! Simple closed curves on the (punctured) torus.
//!
//! A simple closed curve class is a primitive integer vector `(p, q)` up to
//! sign. Intersection numbers are determinants, and the mapping class group
//! is `SL(2, Z)` acting on column vectors.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Canonical primitive representative of a simple closed curve class.
///
/// Invariants: `gcd(|p|, |q|) = 1` and either `q > 0` or `(p, q) = (1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    /// Reduces `(p, q)` to its canonical primitive representative.
    pub fn canonicalize(p: i64, q: i64) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::InvalidSlope);
        }
        let g = gcd(p, q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub const fn p(self) -> i64 {
        self.p
    }

    pub const fn q(self) -> i64 {
        self.q
    }

    pub const HORIZONTAL: Slope = Slope { p: 1, q: 0 };
    pub const VERTICAL: Slope = Slope { p: 0, q: 1 };
    pub const DIAGONAL: Slope = Slope { p: 1, q: 1 };

    pub fn as_foliation(self) -> FoliationVector {
        FoliationVector { a: self.p as f64, b: self.q as f64 }
    }

    /// Geometric intersection number `|ps − qr|`.
    pub fn intersection(self, other: Slope) -> u64 {
        (self.p as i128 * other.q as i128 - self.q as i128 * other.p as i128).unsigned_abs() as u64
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let (p, q) = s.trim().split_once('/').ok_or(Error::InvalidSlope)?;
        let p = p.trim().parse::<i64>().map_err(|_| Error::InvalidSlope)?;
        let q = q.trim().parse::<i64>().map_err(|_| Error::InvalidSlope)?;
        Slope::canonicalize(p, q)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Slope, D::Error> {
        let s = alloc::string::String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A measured foliation on the torus: a real direction with its transverse
/// weight folded into the magnitude. `c·(p, q)` is the weighted curve `c·α`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoliationVector {
    pub a: f64,
    pub b: f64,
}

impl FoliationVector {
    pub fn new(a: f64, b: f64) -> Result<FoliationVector> {
        if !(a.is_finite() && b.is_finite()) || (a == 0.0 && b == 0.0) {
            return Err(Error::InvalidFoliation);
        }
        Ok(FoliationVector { a, b })
    }

    /// Weighted simple closed curve `weight · α`.
    pub fn weighted(alpha: Slope, weight: f64) -> Result<FoliationVector> {
        FoliationVector::new(weight * alpha.p as f64, weight * alpha.q as f64)
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.a, self.b)
    }

    /// Signed intersection `a·v.b − b·v.a`.
    pub fn det(self, v: FoliationVector) -> f64 {
        self.a * v.b - self.b * v.a
    }
}

impl From<Slope> for FoliationVector {
    fn from(s: Slope) -> Self {
        s.as_foliation()
    }
}

/// Intersection pairing `|u.a·v.b − u.b·v.a|` of two torus foliations.
pub fn intersection(u: FoliationVector, v: FoliationVector) -> f64 {
    libm::fabs(u.det(v))
}

/// An element of `SL(2, Z)` acting on slopes as column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MappingClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MappingClass {
    pub const IDENTITY: MappingClass = MappingClass { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<MappingClass> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::InvalidMappingClass { det });
        }
        Ok(MappingClass { a, b, c, d })
    }

    /// A mapping class sending `(1, 0)` to `alpha`.
    ///
    /// The second column is a Farey neighbour of `alpha` found by the extended
    /// Euclidean algorithm.
    pub fn sending_horizontal_to(alpha: Slope) -> MappingClass {
        let (p, q) = (alpha.p, alpha.q);
        // Solve p·s − q·r = 1.
        let (g, x, y) = ext_gcd(p, q);
        debug_assert_eq!(g.abs(), 1);
        let (s, r) = if g == 1 { (x, -y) } else { (-x, y) };
        MappingClass { a: p, b: r, c: q, d: s }
    }

    pub fn inverse(self) -> MappingClass {
        MappingClass { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn compose(self, rhs: MappingClass) -> MappingClass {
        MappingClass {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Raw image of the column vector `(p, q)`, not canonicalized.
    pub fn apply(self, p: i64, q: i64) -> (i64, i64) {
        (self.a * p + self.b * q, self.c * p + self.d * q)
    }

    pub fn apply_foliation(self, v: FoliationVector) -> FoliationVector {
        FoliationVector {
            a: self.a as f64 * v.a + self.b as f64 * v.b,
            b: self.c as f64 * v.a + self.d as f64 * v.b,
        }
    }
}

impl core::ops::Mul for MappingClass {
    type Output = MappingClass;

    fn mul(self, rhs: MappingClass) -> MappingClass {
        self.compose(rhs)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// `n`-fold positive Dehn twist about `alpha`: `I + n·(−pq, p²; −q², pq)`.
pub fn twist_matrix(alpha: Slope, n: i64) -> MappingClass {
    let (p, q) = (alpha.p, alpha.q);
    MappingClass {
        a: 1 - n * p * q,
        b: n * p * p,
        c: -n * q * q,
        d: 1 + n * p * q,
    }
}

/// Canonicalized image of `s` under `m`.
pub fn act_slope(m: MappingClass, s: Slope) -> Slope {
    let (p, q) = m.apply(s.p, s.q);
    Slope::canonicalize(p, q).expect("SL(2,Z) maps nonzero vectors to nonzero vectors")
}

/// Ordered list of distinct canonical slopes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveFamily {
    slopes: Vec<Slope>,
}

impl CurveFamily {
    pub fn new(slopes: Vec<Slope>) -> Result<CurveFamily> {
        if slopes.is_empty() {
            return Err(Error::InvalidFamily("empty"));
        }
        for (i, s) in slopes.iter().enumerate() {
            if slopes[..i].contains(s) {
                return Err(Error::InvalidFamily("duplicate slope"));
            }
        }
        Ok(CurveFamily { slopes })
    }

    pub fn slopes(&self) -> &[Slope] {
        &self.slopes
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn position(&self, s: Slope) -> Option<usize> {
        self.slopes.iter().position(|&x| x == s)
    }

    /// Boundary identification needs at least three pairwise non-parallel
    /// slopes; distinct canonical slopes are never parallel.
    pub fn separates_boundary(&self) -> bool {
        self.slopes.len() >= 3
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Slope> {
        self.slopes.iter()
    }
}

impl<'a> IntoIterator for &'a CurveFamily {
    type Item = &'a Slope;
    type IntoIter = core::slice::Iter<'a, Slope>;

    fn into_iter(self) -> Self::IntoIter {
        self.slopes.iter()
    }
}

/// `{1/0, 0/1, 1/1}` followed by the Stern–Brocot mediants of the first
/// quadrant down to `depth`, breadth-first, starting from the `1/0` side.
pub fn farey_family(depth: u32) -> CurveFamily {
    let mut slopes = alloc::vec![Slope::HORIZONTAL, Slope::VERTICAL, Slope::DIAGONAL];
    let mut level: VecDeque<((i64, i64), (i64, i64))> = VecDeque::new();
    level.push_back(((1, 0), (1, 1)));
    level.push_back(((1, 1), (0, 1)));
    for _ in 0..depth {
        let mut next = VecDeque::with_capacity(level.len() * 2);
        for (l, r) in level {
            let m = (l.0 + r.0, l.1 + r.1);
            slopes.push(Slope { p: m.0, q: m.1 });
            next.push_back((l, m));
            next.push_back((m, r));
        }
        level = next;
    }
    CurveFamily { slopes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::canonicalize(p, q).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(s(2, 4), s(1, 2));
        assert_eq!((s(2, 4).p(), s(2, 4).q()), (1, 2));
        assert_eq!((s(-1, 0).p(), s(-1, 0).q()), (1, 0));
        assert_eq!((s(0, -3).p(), s(0, -3).q()), (0, 1));
        assert_eq!(Slope::canonicalize(0, 0), Err(Error::InvalidSlope));
    }

    #[test]
    fn slope_string_form() {
        assert_eq!(s(2, 1).to_string(), "2/1");
        assert_eq!(Slope::HORIZONTAL.to_string(), "1/0");
        assert_eq!("-2/-4".parse::<Slope>().unwrap(), s(1, 2));
        assert!("0/0".parse::<Slope>().is_err());
        assert!("3".parse::<Slope>().is_err());
    }

    #[test]
    fn intersection_examples() {
        let f = |a: f64, b: f64| FoliationVector::new(a, b).unwrap();
        assert_eq!(intersection(f(1.0, 0.0), f(0.0, 1.0)), 1.0);
        assert_eq!(intersection(f(1.0, 0.0), f(1.0, 0.0)), 0.0);
        assert_eq!(intersection(f(2.0, 1.0), f(1.0, 1.0)), 1.0);
        assert!(FoliationVector::new(0.0, 0.0).is_err());
    }

    #[test]
    fn farey_family_examples() {
        assert_eq!(farey_family(0).slopes(), &[s(1, 0), s(0, 1), s(1, 1)]);
        assert_eq!(
            farey_family(1).slopes(),
            &[s(1, 0), s(0, 1), s(1, 1), s(2, 1), s(1, 2)]
        );
        let d2 = farey_family(2);
        assert_eq!(d2.len(), 9);
        for t in [s(3, 1), s(3, 2), s(2, 3), s(1, 3)] {
            assert!(d2.position(t).is_some());
        }
        assert_eq!(&d2.slopes()[5..], &[s(3, 1), s(3, 2), s(2, 3), s(1, 3)]);
        assert_eq!(farey_family(4).len(), 33);
    }

    #[test]
    fn family_rejects_duplicates() {
        assert!(CurveFamily::new(vec![s(1, 0), s(-1, 0)]).is_err());
        assert!(CurveFamily::new(vec![]).is_err());
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist_matrix(s(1, 0), 1), MappingClass::new(1, 1, 0, 1).unwrap());
        assert_eq!(twist_matrix(s(0, 1), 1), MappingClass::new(1, 0, -1, 1).unwrap());
        assert_eq!(twist_matrix(s(3, 2), 0), MappingClass::IDENTITY);
    }

    #[test]
    fn act_slope_examples() {
        assert_eq!(act_slope(MappingClass::IDENTITY, s(2, 1)), s(2, 1));
        assert_eq!(act_slope(twist_matrix(s(1, 0), 1), s(0, 1)), s(1, 1));
        // (1,0;-1,1)·(1,0) = (1,-1), canonically -1/1.
        assert_eq!(act_slope(twist_matrix(s(0, 1), 1), s(1, 0)), s(-1, 1));
    }

    #[test]
    fn sending_horizontal() {
        for alpha in farey_family(5).iter().copied().chain([s(-3, 5), s(-7, 2)]) {
            let m = MappingClass::sending_horizontal_to(alpha);
            assert_eq!(m.a * m.d - m.b * m.c, 1);
            assert_eq!(m.apply(1, 0), (alpha.p(), alpha.q()));
        }
    }

    fn slope_strategy() -> impl Strategy<Value = Slope> {
        (-40i64..40, -40i64..40)
            .prop_filter("nonzero", |(p, q)| *p != 0 || *q != 0)
            .prop_map(|(p, q)| s(p, q))
    }

    fn mapping_class_strategy() -> impl Strategy<Value = MappingClass> {
        proptest::collection::vec((slope_strategy(), -3i64..4), 1..4).prop_map(|twists| {
            twists
                .into_iter()
                .fold(MappingClass::IDENTITY, |m, (a, n)| m * twist_matrix(a, n))
        })
    }

    proptest! {
        #[test]
        fn intersection_is_mapping_class_invariant(
            u in slope_strategy(), v in slope_strategy(), m in mapping_class_strategy()
        ) {
            prop_assert_eq!(act_slope(m, u).intersection(act_slope(m, v)), u.intersection(v));
            prop_assert_eq!(u.intersection(v), v.intersection(u));
            prop_assert_eq!(u.intersection(u), 0);
        }

        #[test]
        fn twist_fixes_alpha_and_is_additive(a in slope_strategy(), m in -5i64..6, n in -5i64..6) {
            let t = twist_matrix(a, m);
            prop_assert_eq!(act_slope(t, a), a);
            prop_assert_eq!(t.a * t.d - t.b * t.c, 1);
            prop_assert_eq!(t * twist_matrix(a, n), twist_matrix(a, m + n));
        }

        #[test]
        fn canonical_form_is_primitive(p in -100i64..100, q in -100i64..100) {
            prop_assume!(p != 0 || q != 0);
            let c = s(p, q);
            prop_assert_eq!(gcd(c.p(), c.q()), 1);
            prop_assert!(c.q() > 0 || (c.q() == 0 && c.p() == 1));
            prop_assert_eq!(s(-p, -q), c);
        }
    }

    #[test]
    fn farey_families_are_nested() {
        for d in 0..6 {
            let small = farey_family(d);
            let big = farey_family(d + 1);
            assert_eq!(&big.slopes()[..small.len()], small.slopes());
            for x in big.iter() {
                assert_eq!(Slope::canonicalize(x.p(), x.q()).unwrap(), *x);
            }
            assert!(CurveFamily::new(big.slopes().to_vec()).is_ok());
        }
    }
}
