//! The cell structure of the boundary of the region above all hemispheres,
//! projected to the plane, and its lift.

use super::vertex::Vertex;
use super::CellError;
use crate::arith::{KElem, Rational};
use crate::geometry::{defect, Hemisphere, UhsPoint};
use crate::swan::index::{shift_elem, PeriodicIndex};
use crate::swan::power::{neighbors, Disk};
use crate::swan::Polyhedron;
use num_traits::{Signed, Zero};

/// The 2-cell carried by one hemisphere.
#[derive(Clone, Debug)]
pub struct PlanarPolygon {
    pub carrier: Hemisphere,
    /// Corners, counterclockwise in the chart.
    pub corners: Vec<KElem>,
    /// Lifted boundary vertices, counterclockwise, including vertices of
    /// neighboring cells that lie inside a side.
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug)]
pub struct PlanarStructure {
    pub polygons: Vec<PlanarPolygon>,
}

fn lift(s: &Hemisphere, z: &KElem) -> Vertex {
    let f = defect(s, z);
    if f.is_zero() {
        Vertex::Cusp(z.clone())
    } else {
        Vertex::Point(UhsPoint::new(z.clone(), -f))
    }
}

/// Chart dot product.
fn dot(a: &KElem, b: &KElem) -> Rational {
    a.x() * b.x() + a.y() * b.y()
}

/// Twice the signed chart area of a polygon.
pub fn chart_area2(pts: &[KElem]) -> Rational {
    let n = pts.len();
    (0..n).fold(Rational::zero(), |acc, i| {
        acc + pts[(i + 1) % n].cross(&pts[i])
    })
}

pub fn is_convex_ccw(pts: &[KElem]) -> bool {
    let n = pts.len();
    n >= 3
        && (0..n).all(|i| {
            let a = &pts[i];
            let b = &pts[(i + 1) % n];
            let c = &pts[(i + 2) % n];
            // cross(b - a, c - b) > 0 in the chart
            (c - b).cross(&(b - a)).is_positive()
        })
}

pub fn planar_cell_structure(poly: &Polyhedron) -> Result<PlanarStructure, CellError> {
    let ring = poly.ctx.ring;
    let list = &poly.list.entries;
    let mut index = PeriodicIndex::new(ring, 0.25);
    for (i, h) in list.iter().enumerate() {
        index.insert(i, h);
    }
    let mut polygons = Vec::with_capacity(list.len());
    for (i, s) in list.iter().enumerate() {
        let corners = poly.cells[i].clone();
        if !is_convex_ccw(&corners) {
            return Err(CellError::Consistency(format!(
                "polygon on {s} is not convex"
            )));
        }
        let d = Disk::new(ring, s, (0, 0));
        let mut extra: Vec<KElem> = Vec::new();
        for (j, t, _) in neighbors(ring, list, &index, &d) {
            let sh = shift_elem(ring, t);
            extra.extend(poly.cells[j].iter().map(|z| z + &sh));
        }
        let n = corners.len();
        let mut vertices = Vec::new();
        for k in 0..n {
            let a = &corners[k];
            let b = &corners[(k + 1) % n];
            vertices.push(lift(s, a));
            let dir = b - a;
            let len2 = dot(&dir, &dir);
            let mut inner: Vec<(Rational, KElem)> = extra
                .iter()
                .filter_map(|w| {
                    let v = w - a;
                    if !v.cross(&dir).is_zero() {
                        return None;
                    }
                    let t = dot(&v, &dir) / &len2;
                    (t.is_positive() && t < Rational::from_integer(1.into()))
                        .then(|| (t, w.clone()))
                })
                .collect();
            inner.sort_by(|x, y| x.0.cmp(&y.0));
            inner.dedup_by(|x, y| x.0 == y.0);
            for (_, w) in inner {
                vertices.push(lift(s, &w));
            }
        }
        polygons.push(PlanarPolygon {
            carrier: s.clone(),
            corners,
            vertices,
        });
    }
    Ok(PlanarStructure { polygons })
}

/// Area of the chart rectangle `D0`, the covolume of `O`.
pub fn rectangle_area(poly: &Polyhedron) -> Rational {
    if poly.ctx.ring.is_three_mod_four() {
        Rational::new(1.into(), 2.into())
    } else {
        Rational::from_integer(1.into())
    }
}
