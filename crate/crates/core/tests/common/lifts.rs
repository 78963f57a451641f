//! Dimensions of base-change lifts from classical holomorphic newforms.
//!
//! For odd `n` the lifts of weight `n + 2` come from `S_{n+2}(Γ0(|D|), χ_D)`
//! (Cohen–Oesterlé) with the `h` forms having CM by `K` removed and the pairs
//! `f`, `f ⊗ χ_D` identified. For even `n` and `D = -p` with `p ≡ 3 mod 4`
//! prime, they come from level one and from the depth-zero supercuspidal
//! type of `GL_2(Q_p)` attached to the order-4 characters of `F_{p^2}^×`
//! trivial on `F_p^×`, whose multiplicity is a vector-valued dimension.

use num_rational::Rational64 as Q;

pub fn fundamental_discriminant(m: i64) -> i64 {
    if m % 4 == 3 {
        -m
    } else {
        -4 * m
    }
}

/// Number of reduced primitive positive definite forms of discriminant `d`.
pub fn class_number(d: i64) -> usize {
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b.abs()), c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Kronecker symbol `(d / n)` for `n >= 1`.
pub fn kronecker(d: i64, mut n: i64) -> i64 {
    assert!(n >= 1);
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    // Jacobi symbol (d / n), n odd
    let mut a = d.rem_euclid(n);
    let mut n = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `dim S_w(SL_2(Z))`.
pub fn level_one(w: i64) -> i64 {
    if w % 2 == 1 || w < 4 {
        0
    } else if w % 12 == 2 {
        w / 12 - 1
    } else {
        w / 12
    }
}

/// `dim S_w(Γ0(N), χ_D)` for `N = |D|` and odd `w >= 3` (Cohen–Oesterlé with a
/// primitive character of conductor `N`).
pub fn cohen_oesterle(d: i64, w: i64) -> i64 {
    assert!(w >= 3 && w % 2 == 1);
    let n = d.abs();
    let primes: Vec<i64> = (2..=n)
        .filter(|p| n % p == 0 && (2..*p).all(|q| p % q != 0))
        .collect();
    let psi = primes
        .iter()
        .fold(Q::from(n), |acc, &p| acc * Q::new(p + 1, p));
    let lambda = 1i64 << primes.len();
    let chi = |x: i64| if gcd(x, n) == 1 { kronecker(d, x) } else { 0 };
    let mu = match w % 3 {
        0 => Q::new(1, 3),
        1 => Q::from(0),
        _ => Q::new(-1, 3),
    };
    let s3: i64 = (0..n).filter(|x| (x * x + x + 1) % n == 0).map(chi).sum();
    let v = psi * Q::new(w - 1, 12) - Q::new(lambda, 2) + mu * Q::from(s3);
    assert!(v.is_integer(), "non-integral dimension {v}");
    v.to_integer()
}

/// Multiplicity of the order-4 depth-zero supercuspidal type of `GL_2(Q_p)` in
/// weight `w`, as a vector-valued dimension for the `(p - 1)`-dimensional
/// representation of `SL_2(F_p)`.
pub fn type_multiplicity(p: i64, w: i64) -> i64 {
    assert!(p % 4 == 3 && w % 2 == 0);
    let tr_s = -2 * kronecker(2, p);
    let tr_st = if p % 3 == 1 { 0 } else { -2 };
    let sign_s = if (w / 2) % 2 == 0 { 1 } else { -1 };
    // (2 / (3 sqrt 3)) cos(pi (2w + 1) / 6), divided by tr(ST)
    let c = match (2 * w + 1) % 12 {
        1 | 11 => Q::new(1, 3),
        5 | 7 => Q::new(-1, 3),
        _ => Q::from(0),
    };
    let v = Q::new((p - 1) * (w - 1), 12) + Q::new(tr_s * sign_s, 4) + c * Q::from(tr_st);
    assert!(v.is_integer(), "non-integral multiplicity {v}");
    v.to_integer()
}

fn is_prime(p: i64) -> bool {
    p > 1 && (2..).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

/// Dimension of the lifts in `S_n(1)` for `K = Q(sqrt(-m))`, when a classical
/// count is available here.
pub fn lift_dimension(m: i64, n: i64) -> Option<i64> {
    let d = fundamental_discriminant(m);
    let h = class_number(d) as i64;
    let w = n + 2;
    if n % 2 == 1 {
        let s = cohen_oesterle(d, w);
        assert!((s - h) % 2 == 0);
        return Some((s - h) / 2);
    }
    let p = -d;
    if h == 1 && p % 4 == 3 && is_prime(p) {
        let mult = type_multiplicity(p, w);
        return Some(level_one(w) + (mult - 1) / 2);
    }
    None
}
