//! Identifications and stabilizers of cusps in `K`.

use super::group::GroupElement;
use crate::arith::{as_fraction, ideal_basis, inverse_square_basis, KElem, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer solution `x` of `sum_i x_i cols[i] = target`, if one exists.
pub(crate) fn solve_int(
    cols: &[(BigInt, BigInt)],
    target: &(BigInt, BigInt),
) -> Option<Vec<BigInt>> {
    let k = cols.len();
    let mut a: Vec<[BigInt; 2]> = cols.iter().map(|c| [c.0.clone(), c.1.clone()]).collect();
    // u[j] holds the combination of the original columns forming column j
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|j| {
            (0..k)
                .map(|i| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let combine =
        |a: &mut Vec<[BigInt; 2]>, u: &mut Vec<Vec<BigInt>>, row: usize, p: usize, j: usize| {
            // replace columns p, j by a unimodular combination clearing a[j][row]
            let e = a[p][row].extended_gcd(&a[j][row]);
            let (x, y) = (e.x, e.y);
            let s = &a[j][row] / &e.gcd;
            let t = &a[p][row] / &e.gcd;
            let np: [BigInt; 2] = [0, 1].map(|r| &x * &a[p][r] + &y * &a[j][r]);
            let nj: [BigInt; 2] = [0, 1].map(|r| &t * &a[j][r] - &s * &a[p][r]);
            let up: Vec<BigInt> = (0..u[p].len())
                .map(|i| &x * &u[p][i] + &y * &u[j][i])
                .collect();
            let uj: Vec<BigInt> = (0..u[p].len())
                .map(|i| &t * &u[j][i] - &s * &u[p][i])
                .collect();
            a[p] = np;
            a[j] = nj;
            u[p] = up;
            u[j] = uj;
        };
    let mut pivots = Vec::new();
    let mut start = 0;
    for row in 0..2 {
        let Some(p) = (start..k).find(|&j| !a[j][row].is_zero()) else {
            continue;
        };
        a.swap(start, p);
        u.swap(start, p);
        for j in start + 1..k {
            if !a[j][row].is_zero() {
                combine(&mut a, &mut u, row, start, j);
            }
        }
        pivots.push((row, start));
        start += 1;
    }
    // back substitution on the echelon columns
    let mut rest = [target.0.clone(), target.1.clone()];
    let mut coef = vec![BigInt::zero(); k];
    for &(row, col) in &pivots {
        let pv = &a[col][row];
        if !rest[row].is_multiple_of(pv) {
            return None;
        }
        let c = &rest[row] / pv;
        for r in 0..2 {
            rest[r] -= &c * &a[col][r];
        }
        coef[col] = c;
    }
    if !rest[0].is_zero() || !rest[1].is_zero() {
        return None;
    }
    let mut x = vec![BigInt::zero(); k];
    for j in 0..k {
        for i in 0..k {
            x[i] += &coef[j] * &u[j][i];
        }
    }
    Some(x)
}

fn coords(e: &KElem) -> (BigInt, BigInt) {
    e.integral_coords().expect("integral element")
}

/// `(gamma, delta)` in `(alpha, beta)^(-1)` with `alpha delta - beta gamma = 1`.
pub fn complement(alpha: &KElem, beta: &KElem) -> (KElem, KElem) {
    let [b1, b2] = ideal_basis(&[alpha.conj(), beta.conj()]).expect("nonzero ideal");
    let n = b1.r() * b2.w();
    let cols = [
        coords(&(alpha * &b1)),
        coords(&(alpha * &b2)),
        coords(&-(beta * &b1)),
        coords(&-(beta * &b2)),
    ];
    let target = (n.to_integer(), BigInt::zero());
    let x = solve_int(&cols, &target).expect("ideal and its conjugate are coprime up to the norm");
    let xs: Vec<Rational> = x.into_iter().map(Rational::from_integer).collect();
    let inv = Rational::one() / n;
    let e = &b1.scale(&xs[0]) + &b2.scale(&xs[1]);
    let g = &b1.scale(&xs[2]) + &b2.scale(&xs[3]);
    (g.scale(&inv), e.scale(&inv))
}

/// A generator of the ideal generated by `gens`, if it is principal.
pub fn principal_generator(gens: &[KElem]) -> Option<KElem> {
    let [b1, b2] = ideal_basis(gens).ok()?;
    let n = (b1.r() * b2.w()).to_integer();
    // N(x b1 + y b2) = A x^2 + B x y + C y^2
    let a = b1.norm().to_integer();
    let b = (&b1 * &b2.conj()).trace().to_integer();
    let c = b2.norm().to_integer();
    let disc = BigInt::from(4) * &a * &c - &b * &b;
    let bound: BigInt = BigInt::from(4) * &a * &n / &disc;
    let ymax: BigInt = bound.sqrt() + 1;
    let ymax = ymax.to_i64()?;
    for y in 0..=ymax {
        // A x^2 + B y x + (C y^2 - n) = 0
        let yb = BigInt::from(y);
        let d = &b * &b * &yb * &yb - BigInt::from(4) * &a * (&c * &yb * &yb - &n);
        if d.is_negative() {
            continue;
        }
        let s = d.sqrt();
        if &s * &s != d {
            continue;
        }
        for num in [-&b * &yb + &s, -&b * &yb - &s] {
            if num.is_multiple_of(&(BigInt::from(2) * &a)) {
                let x = Rational::from_integer(num / (BigInt::from(2) * &a));
                let g = &b1.scale(&x) + &b2.scale(&Rational::from_integer(yb.clone()));
                if g.norm() == Rational::from_integer(n.clone()) {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// `M` in `SL_2(O)` with `M s = t`, when the cusps `s` and `t` lie in the same class.
pub fn cusp_map(s: &KElem, t: &KElem) -> Option<GroupElement> {
    let (a1, b1) = as_fraction(s);
    let (a2, b2) = as_fraction(t);
    let g = principal_generator(&[
        &a1 * &a2.conj(),
        &a1 * &b2.conj(),
        &b1 * &a2.conj(),
        &b1 * &b2.conj(),
    ])?;
    let [i1, i2] = ideal_basis(&[a2.clone(), b2.clone()]).ok()?;
    let kappa = g.scale(&(Rational::one() / (i1.r() * i2.w())));
    let (a2, b2) = (&kappa * &a2, &kappa * &b2);
    let (g1, d1) = complement(&a1, &b1);
    let (g2, d2) = complement(&a2, &b2);
    // (a2 g2; b2 d2) (d1 -g1; -b1 a1)
    let m = GroupElement::new_unchecked(
        &(&a2 * &d1) - &(&g2 * &b1),
        &(&g2 * &a1) - &(&a2 * &g1),
        &(&b2 * &d1) - &(&d2 * &b1),
        &(&d2 * &a1) - &(&b2 * &g1),
    );
    if !m.is_valid() || m.apply_cusp(s).as_ref() != Some(t) {
        return None;
    }
    Some(m)
}

/// Two unipotent generators of the stabilizer of the cusp `s` modulo `+-I`.
pub fn cusp_stabilizer_generators(s: &KElem) -> [GroupElement; 2] {
    let (l, m) = as_fraction(s);
    let basis = inverse_square_basis(&l, &m).expect("nonzero pair");
    basis.map(|a| {
        let lm = &(&a * &l) * &m;
        let ring = s.ring();
        GroupElement::new(
            &ring.one() - &lm,
            &(&a * &l) * &l,
            -&(&(&a * &m) * &m),
            &ring.one() + &lm,
        )
    })
}
