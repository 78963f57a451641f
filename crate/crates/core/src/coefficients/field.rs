//! Coefficient fields: `K` itself, and residue fields of `O` at primes `p > 3`
//! not dividing the discriminant.

use crate::arith::{KElem, Ring};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p = {0} is too small (6 must be invertible)")]
    Small(u64),
    #[error("p = {0} ramifies in O")]
    Ramified(u64),
    #[error("p = {0} is inert; use the quadratic extension")]
    Inert(u64),
    #[error("p = {0} splits; use the prime field")]
    Split(u64),
    #[error("p = {0} exceeds 2^31")]
    TooLarge(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    KRational,
    Prime { p: u64 },
    Quadratic { p: u64 },
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldKind::KRational => write!(f, "K"),
            FieldKind::Prime { p } => write!(f, "F_{p}"),
            FieldKind::Quadratic { p } => write!(f, "F_{p}^2"),
        }
    }
}

/// A field receiving `O` together with a conjugation.
pub trait Field: Clone + Debug + Send + Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn from_int(&self, x: i64) -> Self::E;
    /// Image of an integral element of `K`.
    fn embed(&self, x: &KElem) -> Self::E;
    /// Image of the complex conjugate of an integral element.
    fn embed_conj(&self, x: &KElem) -> Self::E;
    fn kind(&self) -> FieldKind;
}

/// `K = Q(sqrt(-m))` with exact rational coordinates.
#[derive(Clone, Debug)]
pub struct KField {
    pub ring: Ring,
}

impl Field for KField {
    type E = KElem;
    fn zero(&self) -> KElem {
        self.ring.zero()
    }
    fn one(&self) -> KElem {
        self.ring.one()
    }
    fn add(&self, a: &KElem, b: &KElem) -> KElem {
        a + b
    }
    fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        a - b
    }
    fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        a * b
    }
    fn neg(&self, a: &KElem) -> KElem {
        -a
    }
    fn inv(&self, a: &KElem) -> Option<KElem> {
        a.inv()
    }
    fn is_zero(&self, a: &KElem) -> bool {
        a.is_zero()
    }
    fn from_int(&self, x: i64) -> KElem {
        self.ring.elem(x, 0)
    }
    fn embed(&self, x: &KElem) -> KElem {
        x.clone()
    }
    fn embed_conj(&self, x: &KElem) -> KElem {
        x.conj()
    }
    fn kind(&self) -> FieldKind {
        FieldKind::KRational
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Square root modulo an odd prime (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (
        s,
        pow_mod(z, q, p),
        pow_mod(a, q, p),
        pow_mod(a, (q + 1) / 2, p),
    );
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r < BigInt::zero() {
        r + BigInt::from(p)
    } else {
        r
    };
    r.to_u64().expect("residue fits")
}

/// Splitting behaviour of `p` in `O`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn splitting(ring: Ring, p: u64) -> Splitting {
    let d = ring.discriminant();
    let dm = d.rem_euclid(p as i64) as u64;
    if dm == 0 {
        Splitting::Ramified
    } else if pow_mod(dm, (p - 1) / 2, p) == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    }
}

fn check_prime(ring: Ring, p: u64) -> Result<Splitting, FieldError> {
    if p <= 3 {
        return Err(FieldError::Small(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(FieldError::TooLarge(p));
    }
    match splitting(ring, p) {
        Splitting::Ramified => Err(FieldError::Ramified(p)),
        s => Ok(s),
    }
}

/// `O / P` for a prime `P` of degree one above a split `p`; conjugation maps
/// to the reduction at the conjugate prime.
#[derive(Clone, Debug)]
pub struct Fp {
    pub p: u64,
    /// Image of `omega`.
    pub t: u64,
    /// Image of `conj(omega)`.
    pub t_conj: u64,
}

impl Fp {
    /// `second` selects the other prime above `p`.
    pub fn new(ring: Ring, p: u64, second: bool) -> Result<Self, FieldError> {
        if check_prime(ring, p)? == Splitting::Inert {
            return Err(FieldError::Inert(p));
        }
        let m = ring.m() as u64 % p;
        let s = sqrt_mod((p - m) % p, p).expect("split prime");
        let s = if second { (p - s) % p } else { s };
        let inv2 = (p + 1) / 2;
        let (t, t_conj) = if ring.is_three_mod_four() {
            // omega = (-1 + sqrt(-m)) / 2
            ((p - 1 + s) % p * inv2 % p, (2 * p - 1 - s) % p * inv2 % p)
        } else {
            (s, (p - s) % p)
        };
        Ok(Fp { p, t, t_conj })
    }

    fn image(&self, x: &KElem, root: u64) -> u64 {
        let (r, w) = x.integral_coords().expect("integral element");
        (reduce(&r, self.p) + reduce(&w, self.p) * root) % self.p
    }
}

impl Field for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| pow_mod(*a, self.p - 2, self.p))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_int(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }
    fn embed(&self, x: &KElem) -> u64 {
        self.image(x, self.t)
    }
    fn embed_conj(&self, x: &KElem) -> u64 {
        self.image(x, self.t_conj)
    }
    fn kind(&self) -> FieldKind {
        FieldKind::Prime { p: self.p }
    }
}

/// `O / p` for an inert `p`: the field `F_p[s] / (s^2 + m)`, conjugation `s -> -s`
/// (the Frobenius).
#[derive(Clone, Debug)]
pub struct Fp2 {
    pub p: u64,
    /// `-m mod p`, a non-residue.
    nu: u64,
    three: bool,
}

impl Fp2 {
    pub fn new(ring: Ring, p: u64) -> Result<Self, FieldError> {
        if check_prime(ring, p)? == Splitting::Split {
            return Err(FieldError::Split(p));
        }
        let nu = (p - ring.m() as u64 % p) % p;
        Ok(Fp2 {
            p,
            nu,
            three: ring.is_three_mod_four(),
        })
    }

    fn image(&self, x: &KElem, sign: bool) -> (u64, u64) {
        let p = self.p;
        let (r, w) = x.integral_coords().expect("integral element");
        let (r, w) = (reduce(&r, p), reduce(&w, p));
        // omega = s or (-1 + s)/2
        let (a, b) = if self.three {
            let inv2 = (p + 1) / 2;
            ((r + (p - w) * inv2 % p) % p, w * inv2 % p)
        } else {
            (r, w)
        };
        if sign {
            (a, (p - b) % p)
        } else {
            (a, b)
        }
    }
}

impl Field for Fp2 {
    type E = (u64, u64);
    fn zero(&self) -> (u64, u64) {
        (0, 0)
    }
    fn one(&self) -> (u64, u64) {
        (1, 0)
    }
    fn add(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        ((a.0 + b.0) % self.p, (a.1 + b.1) % self.p)
    }
    fn sub(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        ((a.0 + self.p - b.0) % self.p, (a.1 + self.p - b.1) % self.p)
    }
    fn mul(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        let p = self.p;
        (
            (a.0 * b.0 % p + a.1 * b.1 % p * self.nu) % p,
            (a.0 * b.1 + a.1 * b.0) % p,
        )
    }
    fn neg(&self, a: &(u64, u64)) -> (u64, u64) {
        ((self.p - a.0) % self.p, (self.p - a.1) % self.p)
    }
    fn inv(&self, a: &(u64, u64)) -> Option<(u64, u64)> {
        let p = self.p;
        // (a0 + a1 s)^(-1) = (a0 - a1 s) / (a0^2 - nu a1^2)
        let n = (a.0 * a.0 % p + p - a.1 * a.1 % p * self.nu % p) % p;
        if n == 0 {
            return None;
        }
        let ni = pow_mod(n, p - 2, p);
        Some((a.0 * ni % p, (p - a.1) % p * ni % p))
    }
    fn is_zero(&self, a: &(u64, u64)) -> bool {
        a.0 == 0 && a.1 == 0
    }
    fn from_int(&self, x: i64) -> (u64, u64) {
        (x.rem_euclid(self.p as i64) as u64, 0)
    }
    fn embed(&self, x: &KElem) -> (u64, u64) {
        self.image(x, false)
    }
    fn embed_conj(&self, x: &KElem) -> (u64, u64) {
        self.image(x, true)
    }
    fn kind(&self) -> FieldKind {
        FieldKind::Quadratic { p: self.p }
    }
}

/// Good primes `5 <= p <= bound`: unramified in `O`, ascending.
pub fn good_primes(ring: Ring, bound: u64) -> Vec<u64> {
    (5..=bound)
        .filter(|&p| is_prime(p) && splitting(ring, p) != Splitting::Ramified)
        .collect()
}
