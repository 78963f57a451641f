//! Singular cusps by brute force: cusps `λ/μ` in `D0` that lie strictly
//! below no hemisphere `|μ' z - λ'| = 1` with `(μ', λ')` unimodular.

use bianchi::arith::{is_unimodular, KElem, Ring};
use bianchi::geometry::{in_half_open_rectangle, reduce_to_rectangle};

fn elements_of_norm_at_most(ring: Ring, bound: i64) -> Vec<KElem> {
    let mut out = Vec::new();
    let r = (4 * bound + 4) as f64;
    let k = r.sqrt() as i64 + 2;
    for a in -k..=k {
        for b in -k..=k {
            let z = ring.elem(a, b);
            let n = z.norm();
            if !z.is_zero() && n <= bianchi::arith::int(bound) {
                out.push(z);
            }
        }
    }
    out
}

fn covered(ring: Ring, z: &KElem, mus: &[KElem]) -> bool {
    mus.iter().any(|mu| {
        let target = mu * z;
        let (_, t) = reduce_to_rectangle(&target);
        // lattice points near mu z
        (-2..=2).any(|a| {
            (-2..=2).any(|b| {
                let lambda = &(-&t) + &ring.elem(a, b);
                (&target - &lambda).norm() < bianchi::arith::int(1)
                    && is_unimodular(mu, &lambda).unwrap_or(false)
            })
        })
    })
}

/// Singular cusps in the half-open `D0`, from denominators of norm at most
/// `bound`, tested against hemispheres with `N(μ') <= bound`.
pub fn brute_force_singular(ring: Ring, bound: i64) -> Vec<KElem> {
    let mus = elements_of_norm_at_most(ring, bound);
    let m = ring.m();
    let mut out: Vec<KElem> = Vec::new();
    for mu in &mus {
        // |lambda|^2 <= |z|^2 N(mu) <= (1 + m) N(mu)
        let lb = (1 + m) * bound;
        for lambda in elements_of_norm_at_most(ring, lb) {
            let z = lambda.div(mu).unwrap();
            if !in_half_open_rectangle(&z) || out.contains(&z) {
                continue;
            }
            if !covered(ring, &z, &mus) {
                out.push(z);
            }
        }
    }
    out.sort();
    out
}
