use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Positive definite binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        -a < b && b <= a && a <= c && !(a == c && b < 0)
    }

    /// The unique reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> Form {
        let disc = self.discriminant();
        assert!(disc < 0 && self.a > 0, "form must be positive definite");
        let Form {
            mut a,
            mut b,
            mut c,
        } = *self;
        loop {
            if b > a || b <= -a {
                let k = (a - b).div_euclid(2 * a);
                b += 2 * k * a;
                c = (b * b - disc) / (4 * a);
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Form { a, b, c }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// Reduced primitive positive definite forms of discriminant `disc`, principal form first.
pub fn class_group(disc: i64) -> Vec<Form> {
    assert!(disc < 0 && disc.rem_euclid(4) <= 1);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = Form::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        assert_eq!(class_group(-8).len(), 1);
        assert_eq!(class_group(-20).len(), 2);
        assert_eq!(class_group(-23).len(), 3);
        assert_eq!(class_group(-56).len(), 4);
        assert_eq!(class_group(-4 * 5 * 1).len(), 2);
        assert_eq!(class_group(-163).len(), 1);
        assert_eq!(class_group(-20)[0], Form::new(1, 0, 5));
    }

    #[test]
    fn reduction_is_idempotent_and_keeps_discriminant() {
        let f = Form::new(7, 23, 19);
        let g = f.reduce();
        assert!(g.is_reduced());
        assert_eq!(g.discriminant(), f.discriminant());
        assert_eq!(g.reduce(), g);
        assert_eq!(Form::new(2, 2, 3).reduce(), Form::new(2, 2, 3));
        assert_eq!(Form::new(3, -2, 2).reduce(), Form::new(2, 2, 3));
    }
}
