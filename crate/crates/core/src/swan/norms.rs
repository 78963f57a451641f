use crate::arith::{Rational, Ring};
use num_integer::Roots;
use num_traits::ToPrimitive;

/// Ascending distinct values of `|mu|^2` for nonzero `mu` in `O` with `|mu| <= bound`.
pub fn norm_values_up_to(ring: Ring, bound: &Rational) -> Vec<i64> {
    let b2 = (bound * bound)
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(i64::MAX);
    norms_in_range(ring, 0, b2)
}

/// Ascending distinct squared norms `n` with `lo < n <= hi`.
pub fn norms_in_range(ring: Ring, lo: i64, hi: i64) -> Vec<i64> {
    if hi <= lo {
        return Vec::new();
    }
    let mut seen = vec![false; (hi - lo) as usize];
    let m = ring.m();
    if ring.is_three_mod_four() {
        // 4n = (2a - b)^2 + m b^2
        let mut b = 0i64;
        while m * b * b <= 4 * hi {
            let rest = 4 * hi - m * b * b;
            let tmax = rest.sqrt();
            let mut t = (b % 2).abs();
            while t <= tmax {
                let n = (t * t + m * b * b) / 4;
                if n > lo && n <= hi {
                    seen[(n - lo - 1) as usize] = true;
                }
                t += 2;
            }
            b += 1;
        }
    } else {
        let mut b = 0i64;
        while m * b * b <= hi {
            let amax = (hi - m * b * b).sqrt();
            for a in 0..=amax {
                let n = a * a + m * b * b;
                if n > lo && n <= hi {
                    seen[(n - lo - 1) as usize] = true;
                }
            }
            b += 1;
        }
    }
    seen.iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(i, _)| lo + 1 + i as i64)
        .collect()
}

/// Integer coordinates `(r, w)` of all `mu = r + w*omega` with `|mu|^2 = n`,
/// one of each pair `{mu, -mu}` (the one with positive real part, or positive
/// imaginary part on the imaginary axis).
pub fn elements_of_norm(ring: Ring, n: i64) -> Vec<(i64, i64)> {
    let m = ring.m();
    let mut out = Vec::new();
    if ring.is_three_mod_four() {
        let mut b = -((4 * n / m).sqrt() + 1);
        while b <= (4 * n / m).sqrt() + 1 {
            let rest = 4 * n - m * b * b;
            if rest >= 0 {
                let t = rest.sqrt();
                if t * t == rest {
                    for s in [t, -t] {
                        // 2a - b = s
                        if (s + b) % 2 == 0 {
                            let a = (s + b) / 2;
                            // chart x = a - b/2 = s/2, y = b/2
                            if s > 0 || (s == 0 && b > 0) {
                                out.push((a, b));
                            }
                        }
                        if t == 0 {
                            break;
                        }
                    }
                }
            }
            b += 1;
        }
    } else {
        let bmax = (n / m).sqrt() + 1;
        for b in -bmax..=bmax {
            let rest = n - m * b * b;
            if rest < 0 {
                continue;
            }
            let a = rest.sqrt();
            if a * a != rest {
                continue;
            }
            if a > 0 || (a == 0 && b > 0) {
                out.push((a, b));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
