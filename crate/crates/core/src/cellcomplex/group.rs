use crate::arith::{KElem, Rational, Ring};
use crate::geometry::UhsPoint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::Mul;

/// An element `(a b; c d)` of `SL_2(O)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub a: KElem,
    pub b: KElem,
    pub c: KElem,
    pub d: KElem,
}

impl GroupElement {
    /// Panics unless the entries are integral with determinant 1.
    pub fn new(a: KElem, b: KElem, c: KElem, d: KElem) -> Self {
        let g = GroupElement { a, b, c, d };
        assert!(g.is_valid(), "not an element of SL_2(O): {g}");
        g
    }

    pub fn new_unchecked(a: KElem, b: KElem, c: KElem, d: KElem) -> Self {
        GroupElement { a, b, c, d }
    }

    pub fn is_valid(&self) -> bool {
        let det = &(&self.a * &self.d) - &(&self.b * &self.c);
        det.x().is_one()
            && det.y().is_zero()
            && self.a.is_integral()
            && self.b.is_integral()
            && self.c.is_integral()
            && self.d.is_integral()
    }

    pub fn identity(ring: Ring) -> Self {
        GroupElement::new_unchecked(ring.one(), ring.zero(), ring.zero(), ring.one())
    }

    pub fn minus_identity(ring: Ring) -> Self {
        GroupElement::new_unchecked(-ring.one(), ring.zero(), ring.zero(), -ring.one())
    }

    /// `(1 t; 0 1)`.
    pub fn translation(t: &KElem) -> Self {
        let ring = t.ring();
        GroupElement::new_unchecked(ring.one(), t.clone(), ring.zero(), ring.one())
    }

    pub fn ring(&self) -> Ring {
        self.a.ring()
    }

    pub fn inverse(&self) -> Self {
        GroupElement::new_unchecked(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn neg(&self) -> Self {
        GroupElement::new_unchecked(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::identity(self.ring())
    }

    /// Whether the element is `I` or `-I`.
    pub fn is_central(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.norm().is_one()
    }

    /// Representative modulo `+-I`: the sign making the first nonzero entry positive.
    pub fn projective(&self) -> Self {
        let lead = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|e| !e.is_zero())
            .expect("nonzero matrix");
        if lead.is_negative_sign() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// The standard action on upper half-space:
    /// `zeta' = zeta / D`, `z' = ((a z + b) conj(c z + d) + a conj(c) zeta^2) / D`
    /// with `D = |c z + d|^2 + |c|^2 zeta^2`.
    pub fn apply(&self, p: &UhsPoint) -> UhsPoint {
        let czd = &(&self.c * &p.z) + &self.d;
        let den = czd.norm() + self.c.norm() * &p.h2;
        let azb = &(&self.a * &p.z) + &self.b;
        let num = &(&azb * &czd.conj()) + &(&self.a * &self.c.conj()).scale(&p.h2);
        let inv = Rational::one() / &den;
        UhsPoint::new(num.scale(&inv), &p.h2 * &inv * &inv)
    }

    /// Fractional linear action on a cusp in `K`; `None` for the image `infinity`.
    pub fn apply_cusp(&self, z: &KElem) -> Option<KElem> {
        let den = &(&self.c * z) + &self.d;
        let num = &(&self.a * z) + &self.b;
        num.div(&den)
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (&self.a, &self.b, &self.c, &self.d).cmp(&(&o.a, &o.b, &o.c, &o.d))
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, o: &GroupElement) -> GroupElement {
        GroupElement::new_unchecked(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, o: GroupElement) -> GroupElement {
        &self * &o
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized as `[a_r, a_w, b_r, b_w, c_r, c_w, d_r, d_w]` in the basis `{1, omega}`.
impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(8))?;
        for e in [&self.a, &self.b, &self.c, &self.d] {
            let (r, w) = e.integral_coords().expect("integral entry");
            seq.serialize_element(&r.to_i64().expect("entry fits in i64"))?;
            seq.serialize_element(&w.to_i64().expect("entry fits in i64"))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn translation_and_inversion() {
        let ring = Ring::new(2).unwrap();
        let t = GroupElement::translation(&ring.one());
        let p = UhsPoint::new(ring.elem(0, 1), rat(1, 3));
        let q = t.apply(&p);
        assert_eq!(q, UhsPoint::new(ring.elem(1, 1), rat(1, 3)));
        let s = GroupElement::new(ring.zero(), -ring.one(), ring.one(), ring.zero());
        let top = UhsPoint::new(ring.zero(), int(1));
        assert_eq!(s.apply(&top), top);
        assert!((&s * &s).is_central());
        assert!(!(&s * &s).is_identity());
    }

    #[test]
    fn action_is_a_homomorphism() {
        let ring = Ring::new(7).unwrap();
        let w = ring.omega();
        let g = GroupElement::new(ring.one(), w.clone(), ring.zero(), ring.one());
        let s = GroupElement::new(ring.zero(), -ring.one(), ring.one(), ring.zero());
        let h = &(&s * &g) * &s;
        let p = UhsPoint::new(ring.elem(1, 1).scale(&rat(1, 5)), rat(2, 7));
        assert_eq!((&g * &h).apply(&p), g.apply(&h.apply(&p)));
        assert_eq!(h.inverse().apply(&h.apply(&p)), p);
    }
}
