//! Serialization helpers: exact rationals are written as `"num/den"` strings
//! (integers as plain JSON integers), field elements as their coordinates in
//! the basis `{1, omega}`.

use crate::arith::{KElem, Rational};
use num_traits::{One, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::Serializer;

pub fn rational_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    if q.denom().is_one() {
        if let Some(i) = q.numer().to_i64() {
            return s.serialize_i64(i);
        }
    }
    s.serialize_str(&rational_string(q))
}

pub fn ser_kelem<S: Serializer>(z: &KElem, s: S) -> Result<S::Ok, S::Error> {
    struct R<'a>(&'a Rational);
    impl serde::Serialize for R<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ser_rational(self.0, s)
        }
    }
    let mut st = s.serialize_struct("KElem", 2)?;
    st.serialize_field("r", &R(&z.r()))?;
    st.serialize_field("w", &R(&z.w()))?;
    st.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn rational_format() {
        assert_eq!(rational_string(&rat(-3, 6)), "-1/2");
        assert_eq!(rational_string(&int(7)), "7");
    }
}
