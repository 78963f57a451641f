//! Exact arithmetic in `K = Q(sqrt(-m))`, its ring of integers `O`, ideals of
//! `O` and reduced binary quadratic forms.
//!
//! Elements of `K` are stored in the "chart" coordinates `x + y*sqrt(-m)` with
//! rational `x, y`. The integral basis of `O` is `{1, omega}` where
//! `omega = sqrt(-m)` for `m = 1, 2 mod 4` and `omega = (-1 + sqrt(-m))/2` for
//! `m = 3 mod 4`; [`KElem::r`] and [`KElem::w`] return coordinates in that basis.

mod forms;
mod ideal;
mod kelem;

pub use forms::{class_group, Form};
pub use ideal::{
    as_fraction, cusp_class, ideal_basis, ideal_class, ideal_norm, inverse_square_basis,
    is_unimodular, is_unimodular_int, lattice_hnf, IdealClass,
};
pub use kelem::KElem;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("m = {0} is excluded (the fields Q(i) and Q(sqrt(-3)) carry extra units)")]
    ExcludedField(i64),
    #[error("m = {0} is not a squarefree integer >= 2")]
    NotSquarefree(i64),
    #[error("the pair (0, 0) does not generate an ideal")]
    ZeroPair,
    #[error("element is not an algebraic integer: {0}")]
    NotIntegral(String),
    #[error("negative argument {0} to a square root")]
    Negative(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // huge numerators: scale down before dividing
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
        let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

/// The ring of integers of `Q(sqrt(-m))`, identified by `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    m: i64,
}

impl Ring {
    /// Validates `m` and returns the ring. Use [`field_context`] to also get the class group.
    pub fn new(m: i64) -> Result<Self, ArithError> {
        if m == 1 || m == 3 {
            return Err(ArithError::ExcludedField(m));
        }
        if m < 2 || !is_squarefree(m) {
            return Err(ArithError::NotSquarefree(m));
        }
        Ok(Ring { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn is_three_mod_four(&self) -> bool {
        self.m % 4 == 3
    }

    pub fn discriminant(&self) -> i64 {
        if self.is_three_mod_four() {
            -self.m
        } else {
            -4 * self.m
        }
    }

    /// `|r + w*omega|^2` for integer coordinates.
    pub fn norm_int(&self, r: i64, w: i64) -> i64 {
        let (r, w) = (r as i128, w as i128);
        let m = self.m as i128;
        let n = if self.is_three_mod_four() {
            r * r - r * w + (m + 1) / 4 * w * w
        } else {
            r * r + m * w * w
        };
        n as i64
    }

    /// Integer coordinates of `(r + w*omega) * omega`.
    pub fn mul_omega_int(&self, r: i128, w: i128) -> (i128, i128) {
        let m = self.m as i128;
        if self.is_three_mod_four() {
            (-(m + 1) / 4 * w, r - w)
        } else {
            (-m * w, r)
        }
    }

    /// Integer coordinates of a product of two integral elements.
    pub fn mul_int(&self, a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
        let (ar, aw) = a;
        let (wr, ww) = self.mul_omega_int(b.0, b.1);
        (ar * b.0 + aw * wr, ar * b.1 + aw * ww)
    }

    /// Integer coordinates of the conjugate of `r + w*omega`.
    pub fn conj_int(&self, r: i128, w: i128) -> (i128, i128) {
        if self.is_three_mod_four() {
            // conj(omega) = -1 - omega
            (r - w, -w)
        } else {
            (r, -w)
        }
    }

    pub fn elem(&self, r: i64, w: i64) -> KElem {
        KElem::from_basis(*self, int(r), int(w))
    }

    pub fn elem_big(&self, r: BigInt, w: BigInt) -> KElem {
        KElem::from_basis(*self, Rational::from_integer(r), Rational::from_integer(w))
    }

    pub fn omega(&self) -> KElem {
        self.elem(0, 1)
    }

    pub fn zero(&self) -> KElem {
        KElem::from_rational(*self, Rational::zero())
    }

    pub fn one(&self) -> KElem {
        KElem::from_rational(*self, Rational::one())
    }

    /// `|omega|^2`.
    pub fn omega_norm(&self) -> i64 {
        self.norm_int(0, 1)
    }
}

pub fn is_squarefree(n: i64) -> bool {
    if n <= 0 {
        return false;
    }
    let mut k = n;
    let mut p = 2i64;
    while p * p <= k {
        if k % p == 0 {
            k /= p;
            if k % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The field `K = Q(sqrt(-m))` together with its class group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldContext {
    pub ring: Ring,
    pub discriminant: i64,
    pub class_number: usize,
    /// Reduced primitive forms of discriminant `discriminant`, principal form first.
    pub class_group: Vec<Form>,
}

impl FieldContext {
    pub fn m(&self) -> i64 {
        self.ring.m
    }

    pub fn omega(&self) -> KElem {
        self.ring.omega()
    }
}

pub fn field_context(m: i64) -> Result<FieldContext, ArithError> {
    let ring = Ring::new(m)?;
    let disc = ring.discriminant();
    let class_group = class_group(disc);
    Ok(FieldContext {
        ring,
        discriminant: disc,
        class_number: class_group.len(),
        class_group,
    })
}

/// The exact nonnegative square root of `q` if `q` is the square of a rational.
pub fn rational_sqrt_if_square(q: &Rational) -> Result<Option<Rational>, ArithError> {
    if q.is_negative() {
        return Err(ArithError::Negative(q.to_string()));
    }
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    if &(&sn * &sn) != n {
        return Ok(None);
    }
    let sd = d.sqrt();
    if &(&sd * &sd) != d {
        return Ok(None);
    }
    Ok(Some(Rational::new(sn, sd)))
}

/// Smallest integer `n >= 0` with `n^2 >= q`.
pub fn ceil_sqrt(q: &Rational) -> Result<BigInt, ArithError> {
    if q.is_negative() {
        return Err(ArithError::Negative(q.to_string()));
    }
    let mut n = q.floor().to_integer().sqrt();
    while Rational::from_integer(&n * &n) < *q {
        n += 1;
    }
    Ok(n)
}

/// Largest integer `n >= 0` with `n^2 <= q`.
pub fn floor_sqrt(q: &Rational) -> Result<BigInt, ArithError> {
    if q.is_negative() {
        return Err(ArithError::Negative(q.to_string()));
    }
    Ok(q.floor().to_integer().sqrt())
}

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    a.abs().gcd(&b.abs())
}
