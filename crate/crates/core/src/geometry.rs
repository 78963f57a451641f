//! Exact geometry of the upper half-space model: hemispheres, the below
//! relations between them, agreement lines, lifts and the rectangle `D0`.
//!
//! Heights are always stored squared so that every quantity stays rational.

use crate::arith::{is_unimodular, ArithError, KElem, Rational, Ring};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("hemispheres with a common center have no agreement line")]
    Concentric,
    #[error("point {0} lies outside the projection of the hemisphere")]
    OutsideProjection(String),
    #[error("mu must be nonzero")]
    ZeroMu,
    #[error("pair is not unimodular")]
    NotUnimodular,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A point `(z, zeta)` of upper half-space with `h2 = zeta^2`. Points with
/// `h2 = 0` are cusps on the boundary.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UhsPoint {
    pub z: KElem,
    pub h2: Rational,
}

impl UhsPoint {
    pub fn new(z: KElem, h2: Rational) -> Self {
        UhsPoint { z, h2 }
    }

    pub fn is_cusp(&self) -> bool {
        self.h2.is_zero()
    }
}

impl PartialOrd for UhsPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UhsPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.z
            .lex_cmp(&other.z)
            .then_with(|| self.h2.cmp(&other.h2))
    }
}

impl fmt::Display for UhsPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, zeta^2 = {})", self.z, self.h2)
    }
}

/// The hemisphere `|mu z - lambda|^2 + |mu|^2 zeta^2 = 1`.
#[derive(Clone, Debug)]
pub struct Hemisphere {
    mu: KElem,
    lambda: KElem,
    center: KElem,
    r2: Rational,
}

impl PartialEq for Hemisphere {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center && self.r2 == other.r2
    }
}

impl Eq for Hemisphere {}

impl std::hash::Hash for Hemisphere {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.center.hash(state);
        self.r2.hash(state);
    }
}

impl Hemisphere {
    /// Builds `S_{mu, lambda}`; the sign is normalized so that `mu` is "positive".
    pub fn new(mu: KElem, lambda: KElem) -> Result<Self, GeometryError> {
        if mu.is_zero() {
            return Err(GeometryError::ZeroMu);
        }
        if !is_unimodular(&mu, &lambda)? {
            return Err(GeometryError::NotUnimodular);
        }
        Ok(Self::new_unchecked(mu, lambda))
    }

    /// Skips the unimodularity test; the caller guarantees it.
    pub fn new_unchecked(mu: KElem, lambda: KElem) -> Self {
        let (mu, lambda) = if mu.is_negative_sign() {
            (-&mu, -&lambda)
        } else {
            (mu, lambda)
        };
        let n = mu.norm();
        let center = lambda.div(&mu).expect("mu is nonzero");
        Hemisphere {
            mu,
            lambda,
            center,
            r2: Rational::one() / n,
        }
    }

    pub fn mu(&self) -> &KElem {
        &self.mu
    }

    pub fn lambda(&self) -> &KElem {
        &self.lambda
    }

    pub fn center(&self) -> &KElem {
        &self.center
    }

    /// Squared radius `1/|mu|^2`.
    pub fn r2(&self) -> &Rational {
        &self.r2
    }

    /// `|mu|^2`.
    pub fn mu_norm(&self) -> Rational {
        self.mu.norm()
    }

    pub fn ring(&self) -> Ring {
        self.mu.ring()
    }

    /// The hemisphere moved by the translation `z -> z + t`, `t` integral.
    pub fn translate(&self, t: &KElem) -> Hemisphere {
        Hemisphere {
            mu: self.mu.clone(),
            lambda: &self.lambda + &(&self.mu * t),
            center: &self.center + t,
            r2: self.r2.clone(),
        }
    }

    pub fn radius_f64(&self) -> f64 {
        crate::arith::rat_to_f64(&self.r2).sqrt()
    }
}

impl fmt::Display for Hemisphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[mu = {}, lambda = {}]", self.mu, self.lambda)
    }
}

/// `|z - center|^2 - radius^2`; negative exactly under the dome.
pub fn defect(s: &Hemisphere, z: &KElem) -> Rational {
    (z - &s.center).norm() - &s.r2
}

/// Whether `s1` is strictly below `s2` at `z`.
pub fn strictly_below(s1: &Hemisphere, s2: &Hemisphere, z: &KElem) -> bool {
    defect(s2, z) < defect(s1, z)
}

/// Whether the point `p` is strictly below the hemisphere `s`.
pub fn point_strictly_below(p: &UhsPoint, s: &Hemisphere) -> bool {
    p.h2 < -defect(s, &p.z)
}

/// Whether `s1` lies everywhere below `s2`, i.e. `|c1 - c2| <= r2 - r1`.
pub fn everywhere_below(s1: &Hemisphere, s2: &Hemisphere) -> bool {
    let d2 = (&s1.center - &s2.center).norm();
    everywhere_below_raw(&d2, &s1.r2, &s2.r2)
}

/// `sqrt(d2) <= sqrt(b2) - sqrt(a2)` decided without radicals.
pub fn everywhere_below_raw(d2: &Rational, a2: &Rational, b2: &Rational) -> bool {
    if a2 > b2 {
        return false;
    }
    // (sqrt(b2) - sqrt(a2))^2 = a2 + b2 - 2 sqrt(a2 b2) >= d2
    let rhs = a2 + b2 - d2;
    if rhs.is_negative() {
        return false;
    }
    let four = Rational::from_integer(BigInt::from(4));
    four * a2 * b2 <= &rhs * &rhs
}

/// Whether the open disks under `s1` and `s2` overlap: `|c1 - c2| < r1 + r2`.
pub fn touching(s1: &Hemisphere, s2: &Hemisphere) -> bool {
    let d2 = (&s1.center - &s2.center).norm();
    disks_overlap_raw(&d2, &s1.r2, &s2.r2)
}

/// `sqrt(d2) < sqrt(a2) + sqrt(b2)` decided without radicals.
pub fn disks_overlap_raw(d2: &Rational, a2: &Rational, b2: &Rational) -> bool {
    // d2 < a2 + b2 + 2 sqrt(a2 b2)
    let lhs = d2 - a2 - b2;
    if lhs.is_negative() {
        return true;
    }
    let four = Rational::from_integer(BigInt::from(4));
    &lhs * &lhs < four * a2 * b2
}

/// The real-linear locus `Tr(conj(a) z) = c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgreementLine {
    pub a: KElem,
    pub c: Rational,
}

impl AgreementLine {
    /// Scales so that the first nonzero chart coordinate of `a` is 1.
    pub fn normalized(a: KElem, c: Rational) -> Self {
        let lead = if a.x().is_zero() {
            a.y().clone()
        } else {
            a.x().clone()
        };
        assert!(!lead.is_zero(), "agreement line with a = 0");
        let inv = Rational::one() / lead;
        AgreementLine {
            a: a.scale(&inv),
            c: c * inv,
        }
    }

    /// `Tr(conj(a) z) - c`.
    pub fn eval(&self, z: &KElem) -> Rational {
        (&self.a.conj() * z).trace() - &self.c
    }

    pub fn contains(&self, z: &KElem) -> bool {
        self.eval(z).is_zero()
    }

    /// Intersection point of two lines, `None` when they are parallel.
    pub fn intersect(&self, other: &AgreementLine) -> Option<KElem> {
        let ring = self.a.ring();
        let m = Rational::from_integer(BigInt::from(ring.m()));
        let two = Rational::from_integer(BigInt::from(2));
        // 2 (ax x + m ay y) = c
        let (a11, a12, b1) = (&two * self.a.x(), &two * &m * self.a.y(), self.c.clone());
        let (a21, a22, b2) = (&two * other.a.x(), &two * &m * other.a.y(), other.c.clone());
        let det = &a11 * &a22 - &a12 * &a21;
        if det.is_zero() {
            return None;
        }
        let x = (&b1 * &a22 - &a12 * &b2) / &det;
        let y = (&a11 * &b2 - &b1 * &a21) / &det;
        Some(KElem::new(ring, x, y))
    }
}

impl fmt::Display for AgreementLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tr(conj({}) z) = {}", self.a, self.c)
    }
}

/// The line where `s1` and `s2` have equal defect.
pub fn agreement_line(s1: &Hemisphere, s2: &Hemisphere) -> Result<AgreementLine, GeometryError> {
    let a = &s2.center - &s1.center;
    if a.is_zero() {
        return Err(GeometryError::Concentric);
    }
    let c = s2.center.norm() - s1.center.norm() + &s1.r2 - &s2.r2;
    Ok(AgreementLine::normalized(a, c))
}

/// The point of `s` above `z`.
pub fn lift_on_hemisphere(z: &KElem, s: &Hemisphere) -> Result<UhsPoint, GeometryError> {
    let d = defect(s, z);
    if d.is_positive() {
        return Err(GeometryError::OutsideProjection(z.to_string()));
    }
    Ok(UhsPoint::new(z.clone(), -d))
}

/// Closed membership in the rectangle `D0`.
pub fn in_rectangle(z: &KElem) -> bool {
    let ring = z.ring();
    let (x, y) = (z.x(), z.y());
    let zero = Rational::zero();
    let one = Rational::one();
    if ring.is_three_mod_four() {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        x >= &-&half && x <= &half && y >= &zero && y <= &half
    } else {
        x >= &zero && x <= &one && y >= &zero && y <= &one
    }
}

/// Membership in the half-open rectangle used for canonical representatives.
pub fn in_half_open_rectangle(z: &KElem) -> bool {
    let ring = z.ring();
    let (x, y) = (z.x(), z.y());
    let zero = Rational::zero();
    let one = Rational::one();
    if ring.is_three_mod_four() {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        x >= &-&half && x < &half && y >= &zero && y < &half
    } else {
        x >= &zero && x < &one && y >= &zero && y < &one
    }
}

/// Returns `(z + t, t)` with `t` integral and `z + t` in the half-open rectangle.
pub fn reduce_to_rectangle(z: &KElem) -> (KElem, KElem) {
    let ring = z.ring();
    let t = if ring.is_three_mod_four() {
        let two = Rational::from_integer(BigInt::from(2));
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let k = (z.y() * &two).floor();
        // z - k omega has y in [0, 1/2)
        let x1 = z.x() + &k * &half;
        let j = (&x1 + &half).floor();
        let k = k.to_integer();
        let j = j.to_integer();
        ring.elem_big(-j, -k)
    } else {
        let j = z.x().floor().to_integer();
        let k = z.y().floor().to_integer();
        ring.elem_big(-j, -k)
    };
    (z + &t, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn unit_at(ring: Ring, r: i64, w: i64) -> Hemisphere {
        Hemisphere::new(ring.one(), ring.elem(r, w)).unwrap()
    }

    #[test]
    fn defects() {
        let ring = Ring::new(2).unwrap();
        let s = unit_at(ring, 0, 0);
        assert_eq!(defect(&s, &ring.elem(1, 0)), int(0));
        assert_eq!(defect(&s, &ring.elem(2, 0)), int(3));
        assert_eq!(defect(&s, &ring.zero()), int(-1));
    }

    #[test]
    fn below_relations() {
        let ring = Ring::new(2).unwrap();
        let s0 = unit_at(ring, 0, 0);
        let s1 = unit_at(ring, 1, 0);
        assert!(strictly_below(&s1, &s0, &ring.zero()));
        assert!(!strictly_below(&s0, &s0, &ring.zero()));
        assert!(everywhere_below(&s0, &s0));
        assert!(!everywhere_below(&s0, &s1));
        // radius 1/2 at 0 under the unit hemisphere at 0
        // concentric, radius 1/2 (not a unimodular pair, only the geometry matters)
        let small = Hemisphere::new_unchecked(ring.elem(2, 0), ring.zero());
        assert!(everywhere_below(&small, &s0));
        assert!(!everywhere_below(&s0, &small));
        let p = UhsPoint::new(ring.zero(), rat(1, 2));
        assert!(point_strictly_below(&p, &s0));
        assert!(!point_strictly_below(
            &UhsPoint::new(ring.zero(), int(1)),
            &s0
        ));
    }

    #[test]
    fn agreement_lines() {
        let ring = Ring::new(2).unwrap();
        let s0 = unit_at(ring, 0, 0);
        let s1 = unit_at(ring, 1, 0);
        let l = agreement_line(&s0, &s1).unwrap();
        assert!(l.contains(&KElem::new(ring, rat(1, 2), rat(7, 3))));
        assert!(!l.contains(&KElem::new(ring, rat(1, 3), int(0))));
        assert_eq!(agreement_line(&s1, &s0).unwrap(), l);
        assert_eq!(agreement_line(&s0, &s0), Err(GeometryError::Concentric));
        // radius 1 at 0 and radius 1/2 at 1: |z|^2 - 1 = |z - 1|^2 - 1/4 gives Re z = 7/8
        let half_at_one = Hemisphere::new_unchecked(ring.elem(2, 0), ring.elem(2, 0));
        assert_eq!(half_at_one.r2(), &rat(1, 4));
        let l = agreement_line(&s0, &half_at_one).unwrap();
        assert!(l.contains(&KElem::new(ring, rat(7, 8), rat(-2, 5))));
    }

    #[test]
    fn line_intersection() {
        let ring = Ring::new(7).unwrap();
        let s0 = unit_at(ring, 0, 0);
        let s1 = unit_at(ring, 1, 0);
        let s2 = unit_at(ring, 0, 1);
        let l1 = agreement_line(&s0, &s1).unwrap();
        let l2 = agreement_line(&s0, &s2).unwrap();
        let p = l1.intersect(&l2).unwrap();
        assert_eq!(defect(&s0, &p), defect(&s1, &p));
        assert_eq!(defect(&s0, &p), defect(&s2, &p));
        assert!(l1.intersect(&l1).is_none());
    }

    #[test]
    fn lifts() {
        let ring = Ring::new(2).unwrap();
        let s = unit_at(ring, 0, 0);
        let p = lift_on_hemisphere(&KElem::new(ring, rat(1, 2), int(0)), &s).unwrap();
        assert_eq!(p.h2, rat(3, 4));
        assert_eq!(lift_on_hemisphere(&ring.one(), &s).unwrap().h2, int(0));
        assert!(lift_on_hemisphere(&ring.elem(2, 0), &s).is_err());
        let c = lift_on_hemisphere(s.center(), &s).unwrap();
        assert_eq!(&c.h2, s.r2());
    }

    #[test]
    fn rectangles() {
        let r2 = Ring::new(2).unwrap();
        assert!(in_rectangle(&KElem::new(r2, rat(1, 2), rat(1, 2))));
        assert!(in_rectangle(&r2.zero()));
        let r7 = Ring::new(7).unwrap();
        assert!(!in_rectangle(&KElem::new(r7, int(0), rat(3, 4))));
        assert!(in_rectangle(&r7.zero()));
        for ring in [r2, r7, Ring::new(15).unwrap()] {
            for (x, y) in [
                (rat(17, 5), rat(-9, 4)),
                (rat(-1, 2), rat(1, 2)),
                (int(3), int(5)),
            ] {
                let z = KElem::new(ring, x, y);
                let (w, t) = reduce_to_rectangle(&z);
                assert!(in_half_open_rectangle(&w), "{w}");
                assert!(t.is_integral());
                assert_eq!(&w - &t, z);
            }
        }
    }
}
