use crate::arith::{cusp_class, FieldContext, IdealClass, KElem, Rational};
use crate::geometry::reduce_to_rectangle;
use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

/// A singular cusp on the boundary of the region above all hemispheres,
/// represented in `D0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SingularPoint {
    #[serde(serialize_with = "crate::report::ser_kelem")]
    pub value: KElem,
    pub class: IdealClass,
}

/// The singular points `p (r + sqrt(-m)) / s` modulo `O`, sorted by position.
pub fn singular_points(ctx: &FieldContext) -> Vec<SingularPoint> {
    let ring = ctx.ring;
    let m = ctx.m();
    let three = ring.is_three_mod_four();
    let mut out: Vec<SingularPoint> = Vec::new();
    let mut s = 2i64;
    // s^2 <= r^2 + m <= s^2/4 + m
    while 3 * s * s <= 4 * m {
        let ok_s = if three { s % 2 == 0 && s != 2 } else { s != 1 };
        if ok_s {
            let mut r = -s / 2 + if s % 2 == 0 { 1 } else { 0 };
            while 2 * r <= s {
                let q = r * r + m;
                let divides = if three { q % (2 * s) == 0 } else { q % s == 0 };
                if 2 * r > -s && s * s <= q && divides {
                    let modulus = if three { s / 2 } else { s };
                    for p in 0..modulus {
                        if p.gcd(&modulus) != 1 {
                            continue;
                        }
                        let z = KElem::new(
                            ring,
                            Rational::new(BigInt::from(p * r), BigInt::from(s)),
                            Rational::new(BigInt::from(p), BigInt::from(s)),
                        );
                        let (z, _) = reduce_to_rectangle(&z);
                        if !out.iter().any(|sp| sp.value == z) {
                            let class = cusp_class(&z);
                            out.push(SingularPoint { value: z, class });
                        }
                    }
                }
                r += 1;
            }
        }
        s += 1;
    }
    out.sort_by(|a, b| a.value.lex_cmp(&b.value));
    out
}
