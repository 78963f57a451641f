//! All matrices of `SL_2(O)` sending one interior point of upper half-space to another.
//!
//! With `gamma = (a b; c d)` and `gamma (z, r) = (z', rho)` the height equation reads
//! `|c z + d|^2 + |c|^2 r^2 = r / rho`, so `|c|^2 <= 1/(r rho)` and `d` lies on a
//! circle around `-c z`. The first row is then forced:
//! `a = c z' + conj(c z + d) rho / r` and `b = (a d - 1) / c`.

use super::group::GroupElement;
use crate::arith::{floor_sqrt, rational_sqrt_if_square, KElem, Rational, Ring};
use crate::geometry::UhsPoint;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn floor_i64(x: &Rational) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("coordinate out of range")
}

/// Nonzero `c` in `O` with `|c|^2 <= bound`.
pub fn elements_up_to_norm(ring: Ring, bound: &Rational) -> Vec<KElem> {
    let mut out = Vec::new();
    if bound < &Rational::one() {
        return out;
    }
    let m = ring.m();
    let b = bound
        .floor()
        .to_integer()
        .to_i64()
        .expect("bound out of range");
    if ring.is_three_mod_four() {
        // |j + k omega|^2 = j^2 - j k + (m+1)/4 k^2
        let kmax = floor_sqrt(&(q(4 * b) / q(m))).unwrap().to_i64().unwrap();
        for k in -kmax..=kmax {
            let rest = 4 * b - m * k * k;
            if rest < 0 {
                continue;
            }
            let s = BigInt::from(rest).sqrt().to_i64().unwrap();
            let lo = (k - s).div_euclid(2) - 1;
            let hi = (k + s).div_euclid(2) + 1;
            for j in lo..=hi {
                let n = ring.norm_int(j, k);
                if n >= 1 && n <= b {
                    out.push(ring.elem(j, k));
                }
            }
        }
    } else {
        let kmax = floor_sqrt(&(q(b) / q(m))).unwrap().to_i64().unwrap();
        for k in -kmax..=kmax {
            let rest = b - m * k * k;
            let s = BigInt::from(rest).sqrt().to_i64().unwrap();
            for j in -s..=s {
                if j != 0 || k != 0 {
                    out.push(ring.elem(j, k));
                }
            }
        }
    }
    out
}

/// `d` in `O` with `|w + d|^2 = t`.
fn points_on_circle(ring: Ring, w: &KElem, t: &Rational) -> Vec<KElem> {
    let mut out = Vec::new();
    if t.is_negative() {
        return out;
    }
    let m = q(ring.m());
    let (x, y) = (w.x(), w.y());
    let span = floor_sqrt(&(t / &m)).unwrap().to_i64().unwrap() + 1;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let three = ring.is_three_mod_four();
    // chart imaginary part of d is s (m = 1,2 mod 4) or s/2 (m = 3 mod 4)
    let (s0, width) = if three {
        (floor_i64(&(-y * q(2))), 2 * span + 1)
    } else {
        (floor_i64(&-y), span + 1)
    };
    for s in s0 - width..=s0 + width {
        let dy = if three { q(s) * &half } else { q(s) };
        let e = y + &dy;
        let rest = t - &m * &e * &e;
        if rest.is_negative() {
            continue;
        }
        let Some(root) = rational_sqrt_if_square(&rest).unwrap() else {
            continue;
        };
        let roots = if root.is_zero() {
            vec![root]
        } else {
            vec![root.clone(), -root]
        };
        for rt in roots {
            // chart real part of d is q (resp. q - s/2)
            let re = -x + rt;
            let qv = if three { re + &dy } else { re };
            if qv.is_integer() {
                let qi = qv.to_integer().to_i64().expect("entry out of range");
                out.push(ring.elem(qi, s));
            }
        }
    }
    out
}

/// Every `gamma` in `SL_2(O)` with `gamma p = q`; both points must be interior.
pub fn identification_matrices(ring: Ring, p: &UhsPoint, target: &UhsPoint) -> Vec<GroupElement> {
    assert!(
        p.h2.is_positive() && target.h2.is_positive(),
        "points must be interior"
    );
    let mut out = Vec::new();
    // R = r / rho
    let Some(rr) = rational_sqrt_if_square(&(&p.h2 / &target.h2)).unwrap() else {
        return out;
    };
    if rr.is_one() {
        let t = &target.z - &p.z;
        if t.is_integral() {
            let g = GroupElement::translation(&t);
            out.push(g.neg());
            out.push(g);
        }
    }
    let inv_r = Rational::one() / &rr;
    for c in elements_up_to_norm(ring, &(&rr / &p.h2)) {
        let cz = &c * &p.z;
        let t = &rr - c.norm() * &p.h2;
        for d in points_on_circle(ring, &cz, &t) {
            let a = &(&c * &target.z) + &(&cz + &d).conj().scale(&inv_r);
            if !a.is_integral() {
                continue;
            }
            let Some(b) = (&(&a * &d) - &ring.one()).div(&c) else {
                continue;
            };
            if !b.is_integral() {
                continue;
            }
            let g = GroupElement::new_unchecked(a, b, c.clone(), d);
            debug_assert!(g.is_valid());
            if g.apply(p) == *target {
                out.push(g);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The stabilizer of an interior point, `+-I` included.
pub fn point_stabilizer(ring: Ring, p: &UhsPoint) -> Vec<GroupElement> {
    identification_matrices(ring, p, p)
}
