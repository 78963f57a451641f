use super::{gcd_i128, ArithError, Form, KElem, Rational, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Hermite normal form `{(p, q), (0, s)}` (with `p, s > 0`, `0 <= q < s`) of the
/// lattice in `Z^2` spanned by `gens`, or `None` if the span has rank < 2.
pub fn lattice_hnf(gens: &[(BigInt, BigInt)]) -> Option<((BigInt, BigInt), (BigInt, BigInt))> {
    let mut piv = (BigInt::zero(), BigInt::zero());
    let mut s = BigInt::zero();
    for v in gens {
        if v.0.is_zero() {
            s = s.gcd(&v.1);
        } else if piv.0.is_zero() {
            s = s.gcd(&piv.1);
            piv = v.clone();
        } else {
            let e = piv.0.extended_gcd(&v.0);
            let g = e.gcd;
            let new_piv = (&e.x * &piv.0 + &e.y * &v.0, &e.x * &piv.1 + &e.y * &v.1);
            let a = &v.0 / &g;
            let b = &piv.0 / &g;
            let rem1 = &a * &piv.1 - &b * &v.1;
            s = s.gcd(&rem1);
            piv = new_piv;
        }
    }
    if piv.0.is_zero() || s.is_zero() {
        return None;
    }
    if piv.0.is_negative() {
        piv = (-piv.0, -piv.1);
    }
    let q = piv.1.mod_floor(&s);
    Some(((piv.0, q), (BigInt::zero(), s)))
}

fn integral(e: &KElem) -> Result<(BigInt, BigInt), ArithError> {
    e.integral_coords()
        .ok_or_else(|| ArithError::NotIntegral(e.to_string()))
}

/// A `Z`-basis `{p + q*omega, s*omega}` of the ideal generated by `gens`.
pub fn ideal_basis(gens: &[KElem]) -> Result<[KElem; 2], ArithError> {
    let ring = gens.first().ok_or(ArithError::ZeroPair)?.ring();
    let w = ring.omega();
    let mut vecs = Vec::with_capacity(2 * gens.len());
    for g in gens {
        vecs.push(integral(g)?);
        vecs.push(integral(&(g * &w))?);
    }
    let ((p, q), (_, s)) = lattice_hnf(&vecs).ok_or(ArithError::ZeroPair)?;
    Ok([ring.elem_big(p, q), ring.elem_big(BigInt::zero(), s)])
}

/// Index of the ideal generated by `gens` in `O`.
pub fn ideal_norm(gens: &[KElem]) -> Result<BigInt, ArithError> {
    let [a, b] = ideal_basis(gens)?;
    Ok(a.r().to_integer() * b.w().to_integer())
}

/// Whether `mu` and `lambda` generate `O`.
pub fn is_unimodular(mu: &KElem, lambda: &KElem) -> Result<bool, ArithError> {
    if mu.is_zero() && lambda.is_zero() {
        return Err(ArithError::ZeroPair);
    }
    Ok(ideal_norm(&[mu.clone(), lambda.clone()])?.is_one())
}

/// Fast unimodularity test on integer coordinates.
pub fn is_unimodular_int(ring: Ring, mu: (i64, i64), lambda: (i64, i64)) -> bool {
    let a = (mu.0 as i128, mu.1 as i128);
    let b = (lambda.0 as i128, lambda.1 as i128);
    let v = [
        a,
        ring.mul_omega_int(a.0, a.1),
        b,
        ring.mul_omega_int(b.0, b.1),
    ];
    let mut g = 0i128;
    for i in 0..4 {
        for j in i + 1..4 {
            g = gcd_i128(g, v[i].0 * v[j].1 - v[i].1 * v[j].0);
            if g == 1 {
                return true;
            }
        }
    }
    g == 1
}

/// Ideal class, represented by the reduced form attached to an oriented basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealClass {
    pub form: Form,
}

impl IdealClass {
    pub fn is_principal(&self) -> bool {
        self.form.a == 1
    }
}

fn to_i64(q: &Rational) -> i64 {
    assert!(q.is_integer(), "form coefficient not integral: {q}");
    q.to_integer()
        .to_i64()
        .expect("form coefficient exceeds i64")
}

/// Class of the ideal `(lambda, mu)`.
pub fn ideal_class(lambda: &KElem, mu: &KElem) -> Result<IdealClass, ArithError> {
    if mu.is_zero() && lambda.is_zero() {
        return Err(ArithError::ZeroPair);
    }
    let [a1, a2] = ideal_basis(&[lambda.clone(), mu.clone()])?;
    let n = Rational::from_integer(a1.r().to_integer() * a2.w().to_integer());
    let f = Form::new(
        to_i64(&(a1.norm() / &n)),
        to_i64(&((&a1 * &a2.conj()).trace() / &n)),
        to_i64(&(a2.norm() / &n)),
    );
    Ok(IdealClass { form: f.reduce() })
}

/// Writes `z = lambda / mu` with `mu` a positive integer and `lambda` integral.
pub fn as_fraction(z: &KElem) -> (KElem, KElem) {
    let ring = z.ring();
    let d = z.r().denom().lcm(z.w().denom());
    let mu = KElem::from_rational(ring, Rational::from_integer(d));
    (z * &mu, mu)
}

/// Ideal class of the cusp `z` in `K`.
pub fn cusp_class(z: &KElem) -> IdealClass {
    let (l, m) = as_fraction(z);
    ideal_class(&l, &m).expect("mu is nonzero")
}

/// `Z`-basis of the fractional ideal `(lambda, mu)^(-2)`.
pub fn inverse_square_basis(lambda: &KElem, mu: &KElem) -> Result<[KElem; 2], ArithError> {
    let gens = [lambda * lambda, lambda * mu, mu * mu];
    let [b1, b2] = ideal_basis(&gens)?;
    let n = Rational::from_integer(b1.r().to_integer() * b2.w().to_integer());
    let inv = Rational::one() / n;
    Ok([b1.conj().scale(&inv), b2.conj().scale(&inv)])
}
