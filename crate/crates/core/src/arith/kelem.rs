use super::{Rational, Ring};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element `x + y*sqrt(-m)` of `K = Q(sqrt(-m))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KElem {
    ring: Ring,
    x: Rational,
    y: Rational,
}

impl KElem {
    pub fn new(ring: Ring, x: Rational, y: Rational) -> Self {
        KElem { ring, x, y }
    }

    pub fn from_rational(ring: Ring, q: Rational) -> Self {
        KElem {
            ring,
            x: q,
            y: Rational::zero(),
        }
    }

    /// The element `r + w*omega`.
    pub fn from_basis(ring: Ring, r: Rational, w: Rational) -> Self {
        if ring.is_three_mod_four() {
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let y = &w * &half;
            KElem { ring, x: r - &y, y }
        } else {
            KElem { ring, x: r, y: w }
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Real part.
    pub fn x(&self) -> &Rational {
        &self.x
    }

    /// Coefficient of `sqrt(-m)`.
    pub fn y(&self) -> &Rational {
        &self.y
    }

    /// Coefficient of `1` in the basis `{1, omega}`.
    pub fn r(&self) -> Rational {
        if self.ring.is_three_mod_four() {
            &self.x + &self.y
        } else {
            self.x.clone()
        }
    }

    /// Coefficient of `omega` in the basis `{1, omega}`.
    pub fn w(&self) -> Rational {
        if self.ring.is_three_mod_four() {
            &self.y * Rational::from_integer(BigInt::from(2))
        } else {
            self.y.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn norm(&self) -> Rational {
        &self.x * &self.x + &self.y * &self.y * Rational::from_integer(BigInt::from(self.ring.m()))
    }

    pub fn trace(&self) -> Rational {
        &self.x + &self.x
    }

    pub fn conj(&self) -> KElem {
        KElem {
            ring: self.ring,
            x: self.x.clone(),
            y: -&self.y,
        }
    }

    pub fn inv(&self) -> Option<KElem> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(KElem {
            ring: self.ring,
            x: &self.x / &n,
            y: -&self.y / &n,
        })
    }

    pub fn div(&self, other: &KElem) -> Option<KElem> {
        other.inv().map(|i| self * &i)
    }

    pub fn scale(&self, q: &Rational) -> KElem {
        KElem {
            ring: self.ring,
            x: &self.x * q,
            y: &self.y * q,
        }
    }

    /// Integer coordinates `(r, w)` if this is an algebraic integer.
    pub fn integral_coords(&self) -> Option<(BigInt, BigInt)> {
        let r = self.r();
        let w = self.w();
        if r.is_integer() && w.is_integer() {
            Some((r.to_integer(), w.to_integer()))
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.r().is_integer() && self.w().is_integer()
    }

    /// `Im(self * conj(other))` divided by `sqrt(m)`; sign of the orientation of `(other, self)`.
    pub fn cross(&self, other: &KElem) -> Rational {
        &self.y * &other.x - &self.x * &other.y
    }

    /// Lexicographic order on `(x, y)`; translation invariant.
    pub fn lex_cmp(&self, other: &KElem) -> std::cmp::Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let s = (self.ring.m() as f64).sqrt();
        (super::rat_to_f64(&self.x), super::rat_to_f64(&self.y) * s)
    }

    pub fn is_negative_sign(&self) -> bool {
        self.x.is_negative() || (self.x.is_zero() && self.y.is_negative())
    }
}

impl PartialOrd for KElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lex_cmp(other)
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for KElem {
    /// Writes `x + y*sqrt(-m)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let m = self.ring.m();
        if self.x.is_zero() {
            write!(f, "{}*sqrt(-{})", self.y, m)
        } else if self.y.is_negative() {
            write!(f, "{} - {}*sqrt(-{})", self.x, -&self.y, m)
        } else {
            write!(f, "{} + {}*sqrt(-{})", self.x, self.y, m)
        }
    }
}

impl<'a> Add<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn add(self, o: &KElem) -> KElem {
        debug_assert_eq!(self.ring, o.ring);
        KElem {
            ring: self.ring,
            x: &self.x + &o.x,
            y: &self.y + &o.y,
        }
    }
}

impl<'a> Sub<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn sub(self, o: &KElem) -> KElem {
        debug_assert_eq!(self.ring, o.ring);
        KElem {
            ring: self.ring,
            x: &self.x - &o.x,
            y: &self.y - &o.y,
        }
    }
}

impl<'a> Mul<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn mul(self, o: &KElem) -> KElem {
        debug_assert_eq!(self.ring, o.ring);
        let m = Rational::from_integer(BigInt::from(self.ring.m()));
        KElem {
            ring: self.ring,
            x: &self.x * &o.x - &self.y * &o.y * m,
            y: &self.x * &o.y + &self.y * &o.x,
        }
    }
}

impl Neg for &KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        KElem {
            ring: self.ring,
            x: -&self.x,
            y: -&self.y,
        }
    }
}

impl Add for KElem {
    type Output = KElem;
    fn add(self, o: KElem) -> KElem {
        &self + &o
    }
}

impl Sub for KElem {
    type Output = KElem;
    fn sub(self, o: KElem) -> KElem {
        &self - &o
    }
}

impl Mul for KElem {
    type Output = KElem;
    fn mul(self, o: KElem) -> KElem {
        &self * &o
    }
}

impl Neg for KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;

    #[test]
    fn norms_and_conjugates() {
        let r7 = Ring::new(7).unwrap();
        let w = r7.omega();
        assert_eq!((&r7.one() + &w).norm(), int(2));
        assert_eq!(w.conj(), &(-&r7.one()) - &w);
        let r2 = Ring::new(2).unwrap();
        assert_eq!(r2.elem(1, 1).norm(), int(3));
        assert_eq!(r2.elem(1, 1).conj(), r2.elem(1, -1));
    }

    #[test]
    fn basis_coordinates_roundtrip() {
        for m in [2, 7, 11, 15] {
            let ring = Ring::new(m).unwrap();
            let e = KElem::from_basis(ring, rat(3, 5), rat(-7, 2));
            assert_eq!(e.r(), rat(3, 5));
            assert_eq!(e.w(), rat(-7, 2));
            assert!(!e.is_integral());
            assert!(ring.elem(4, -9).is_integral());
        }
        let r7 = Ring::new(7).unwrap();
        // (1 + sqrt(-7))/2 = 1 + omega
        let h = KElem::new(r7, rat(1, 2), rat(1, 2));
        assert_eq!(
            h.integral_coords(),
            Some((BigInt::from(1), BigInt::from(1)))
        );
    }

    #[test]
    fn inverse() {
        let ring = Ring::new(5).unwrap();
        let a = ring.elem(2, 3);
        assert_eq!(&a * &a.inv().unwrap(), ring.one());
        assert!(ring.zero().inv().is_none());
    }
}
