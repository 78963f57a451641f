use super::group::GroupElement;
use crate::arith::{as_fraction, ideal_norm, KElem, Rational};
use crate::geometry::{reduce_to_rectangle, UhsPoint};
use num_traits::Zero;
use std::fmt;

/// A vertex of the complex. Cells are determined by their vertex sets, so a
/// subdivision point is recorded as the barycenter of the vertex set it subdivides.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Point(UhsPoint),
    /// A singular cusp, at height 0.
    Cusp(KElem),
    /// Barycenter of a sorted vertex set.
    Bary(Vec<Vertex>),
}

impl Vertex {
    pub fn bary(mut vs: Vec<Vertex>) -> Vertex {
        vs.sort();
        vs.dedup();
        Vertex::Bary(vs)
    }

    pub fn act(&self, g: &GroupElement) -> Vertex {
        match self {
            Vertex::Point(p) => Vertex::Point(g.apply(p)),
            Vertex::Cusp(z) => Vertex::Cusp(
                g.apply_cusp(z)
                    .expect("singular cusps never reach infinity"),
            ),
            Vertex::Bary(vs) => Vertex::bary(vs.iter().map(|v| v.act(g)).collect()),
        }
    }

    /// Translation by `t`; preserves the order of vertices.
    pub fn translate(&self, t: &KElem) -> Vertex {
        match self {
            Vertex::Point(p) => Vertex::Point(UhsPoint::new(&p.z + t, p.h2.clone())),
            Vertex::Cusp(z) => Vertex::Cusp(z + t),
            Vertex::Bary(vs) => Vertex::Bary(vs.iter().map(|v| v.translate(t)).collect()),
        }
    }

    /// Smallest `(z, h2)` among the points and cusps this vertex is built from.
    pub fn min_leaf(&self) -> (KElem, Rational) {
        match self {
            Vertex::Point(p) => (p.z.clone(), p.h2.clone()),
            Vertex::Cusp(z) => (z.clone(), Rational::zero()),
            Vertex::Bary(vs) => vs.iter().map(|v| v.min_leaf()).min().expect("nonempty"),
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, Vertex::Cusp(_))
    }

    /// Depth of barycentric nesting.
    pub fn depth(&self) -> usize {
        match self {
            Vertex::Bary(vs) => 1 + vs.iter().map(|v| v.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Floating point position in upper half-space; barycenters use the
    /// Euclidean mean of their leaves, cusps sit at height 0.
    pub fn to_f64(&self) -> (f64, f64, f64) {
        match self {
            Vertex::Point(p) => {
                let (x, y) = p.z.to_f64();
                (x, y, crate::arith::rat_to_f64(&p.h2).sqrt())
            }
            Vertex::Cusp(z) => {
                let (x, y) = z.to_f64();
                (x, y, 0.0)
            }
            Vertex::Bary(vs) => {
                let n = vs.len() as f64;
                vs.iter().map(|v| v.to_f64()).fold((0.0, 0.0, 0.0), |a, b| {
                    (a.0 + b.0 / n, a.1 + b.1 / n, a.2 + b.2 / n)
                })
            }
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Point(p) => write!(f, "{p}"),
            Vertex::Cusp(z) => write!(f, "cusp({z})"),
            Vertex::Bary(vs) => {
                write!(f, "bary(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Translates a vertex list so that its smallest leaf lies in the half-open
/// rectangle. Returns the translated list and the translation used.
pub fn canonical_position(vs: &[Vertex]) -> (Vec<Vertex>, KElem) {
    let (z, _) = vs
        .iter()
        .map(|v| v.min_leaf())
        .min()
        .expect("nonempty cell");
    let (_, t) = reduce_to_rectangle(&z);
    if t.is_zero() {
        return (vs.to_vec(), t);
    }
    (vs.iter().map(|v| v.translate(&t)).collect(), t)
}

/// Diameter of the horoball `{ht_s >= 1}` at the cusp `s = lambda/mu`, where
/// `ht_s(z, zeta) = N(lambda, mu) zeta / (|mu z - lambda|^2 + |mu|^2 zeta^2)`.
/// These horoballs are permuted by the group.
fn horoball_diameter(s: &KElem) -> Rational {
    let (l, m) = as_fraction(s);
    let n = ideal_norm(&[l, m.clone()]).expect("nonzero pair");
    Rational::from_integer(n) / m.norm()
}

/// The point on the geodesic between two cusps where their horoball heights
/// agree. It depends equivariantly on the pair.
pub fn balanced_point(a: &KElem, b: &KElem) -> UhsPoint {
    let (ra, rb) = (horoball_diameter(a), horoball_diameter(b));
    let t = &ra / (&ra + &rb);
    let d = b - a;
    let one = Rational::from_integer(1.into());
    let h2 = d.norm() * &t * (&one - &t);
    UhsPoint::new(a + &d.scale(&t), h2)
}

/// Sorted copy of a vertex list: the key identifying a cell.
pub fn cell_key(vs: &[Vertex]) -> Vec<Vertex> {
    let mut k = vs.to_vec();
    k.sort();
    k
}

/// Relative orientation of two oriented vertex lists spanning the same cell:
/// ordered pairs for edges, cyclic orders for 2-cells.
pub fn orientation_sign(a: &[Vertex], b: &[Vertex]) -> Option<i32> {
    match a.len() {
        0 => None,
        1 => (a == b).then_some(1),
        2 => {
            if a == b {
                Some(1)
            } else if a[0] == b[1] && a[1] == b[0] {
                Some(-1)
            } else {
                None
            }
        }
        n => {
            if b.len() != n {
                return None;
            }
            let start = b.iter().position(|v| *v == a[0])?;
            if (0..n).all(|i| a[i] == b[(start + i) % n]) {
                Some(1)
            } else if (0..n).all(|i| a[i] == b[(start + n - i) % n]) {
                Some(-1)
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, Ring};

    #[test]
    fn orientation_of_cycles() {
        let ring = Ring::new(2).unwrap();
        let v: Vec<Vertex> = (0..4).map(|i| Vertex::Cusp(ring.elem(i, 0))).collect();
        let rot = vec![v[2].clone(), v[3].clone(), v[0].clone(), v[1].clone()];
        let rev = vec![v[1].clone(), v[0].clone(), v[3].clone(), v[2].clone()];
        assert_eq!(orientation_sign(&v, &rot), Some(1));
        assert_eq!(orientation_sign(&v, &rev), Some(-1));
        assert_eq!(
            orientation_sign(&v[..2], &[v[1].clone(), v[0].clone()]),
            Some(-1)
        );
    }

    #[test]
    fn balanced_point_is_equivariant() {
        let ring = Ring::new(15).unwrap();
        let a = ring.elem(0, 1).scale(&rat(1, 2));
        let b = &a + &ring.one().scale(&rat(1, 2));
        let g = GroupElement::new(ring.one(), ring.zero(), ring.elem(1, 1), ring.one());
        let (ga, gb) = (g.apply_cusp(&a).unwrap(), g.apply_cusp(&b).unwrap());
        assert_eq!(g.apply(&balanced_point(&a, &b)), balanced_point(&ga, &gb));
        assert_eq!(balanced_point(&a, &b), balanced_point(&b, &a));
    }

    #[test]
    fn canonical_position_is_translation_invariant() {
        let ring = Ring::new(7).unwrap();
        let a = Vertex::Point(UhsPoint::new(ring.elem(0, 1).scale(&rat(1, 3)), rat(1, 2)));
        let b = Vertex::bary(vec![
            a.clone(),
            Vertex::Point(UhsPoint::new(ring.one(), int(1))),
        ]);
        let cell = vec![a, b];
        let moved: Vec<Vertex> = cell
            .iter()
            .map(|v| v.translate(&ring.elem(3, -2)))
            .collect();
        assert_eq!(canonical_position(&cell).0, canonical_position(&moved).0);
    }
}
