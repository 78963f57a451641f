//! Exact power cells: the region of the plane where a hemisphere is the
//! highest one. Polygons live in the chart coordinates `(x, y)` of
//! `z = x + y*sqrt(-m)` and are kept counterclockwise.

use super::index::{shift_elem, PeriodicIndex, Shift};
use crate::arith::{rat_to_f64, KElem, Rational, Ring};
use crate::geometry::{disks_overlap_raw, Hemisphere};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Pt = (Rational, Rational);

/// Exact data of a (translated) hemisphere needed for power comparisons.
#[derive(Clone, Debug)]
pub(crate) struct Disk {
    pub cx: Rational,
    pub cy: Rational,
    pub r2: Rational,
    /// `|c|^2 - r^2`.
    pub k: Rational,
}

impl Disk {
    pub fn new(ring: Ring, h: &Hemisphere, t: Shift) -> Self {
        let c = if t == (0, 0) {
            h.center().clone()
        } else {
            h.center() + &shift_elem(ring, t)
        };
        let k = c.norm() - h.r2();
        Disk {
            cx: c.x().clone(),
            cy: c.y().clone(),
            r2: h.r2().clone(),
            k,
        }
    }

    /// `|z - c|^2 - r^2`.
    pub fn power(&self, m: &Rational, p: &Pt) -> Rational {
        let dx = &p.0 - &self.cx;
        let dy = &p.1 - &self.cy;
        &dx * &dx + m * &dy * &dy - &self.r2
    }

    fn dist2(&self, m: &Rational, other: &Disk) -> Rational {
        let dx = &other.cx - &self.cx;
        let dy = &other.cy - &self.cy;
        &dx * &dx + m * &dy * &dy
    }

    pub fn overlaps(&self, m: &Rational, other: &Disk) -> bool {
        disks_overlap_raw(&self.dist2(m, other), &self.r2, &other.r2)
    }

    pub fn same_as(&self, other: &Disk) -> bool {
        self.cx == other.cx && self.cy == other.cy && self.r2 == other.r2
    }
}

/// The half plane `a x + b y + c <= 0`.
#[derive(Clone, Debug)]
pub(crate) struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    /// Where the power of `s` does not exceed the power of `t`.
    pub fn bisector(m: &Rational, s: &Disk, t: &Disk) -> Self {
        let two = Rational::from_integer(BigInt::from(2));
        HalfPlane {
            a: &two * (&t.cx - &s.cx),
            b: &two * m * (&t.cy - &s.cy),
            c: &s.k - &t.k,
        }
    }

    pub fn eval(&self, p: &Pt) -> Rational {
        &self.a * &p.0 + &self.b * &p.1 + &self.c
    }
}

pub(crate) fn clip(poly: &[Pt], h: &HalfPlane) -> Vec<Pt> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let vals: Vec<Rational> = poly.iter().map(|p| h.eval(p)).collect();
    if vals.iter().all(|v| !v.is_positive()) {
        return poly.to_vec();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (vp, vq) = (&vals[i], &vals[j]);
        if !vp.is_positive() {
            out.push(poly[i].clone());
        }
        if (vp.is_negative() && vq.is_positive()) || (vp.is_positive() && vq.is_negative()) {
            let t = vp / (vp - vq);
            let (p, q) = (&poly[i], &poly[j]);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    cleanup(out)
}

fn cross(o: &Pt, a: &Pt, b: &Pt) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Removes repeated and collinear vertices.
pub(crate) fn cleanup(mut poly: Vec<Pt>) -> Vec<Pt> {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    let mut changed = true;
    while changed && poly.len() >= 3 {
        changed = false;
        let n = poly.len();
        for i in 0..n {
            let prev = &poly[(i + n - 1) % n];
            let next = &poly[(i + 1) % n];
            if cross(prev, &poly[i], next).is_zero() {
                poly.remove(i);
                changed = true;
                break;
            }
        }
    }
    poly
}

/// Twice the signed chart area.
pub(crate) fn area2(poly: &[Pt]) -> Rational {
    let n = poly.len();
    let mut s = Rational::zero();
    for i in 0..n {
        let j = (i + 1) % n;
        s += &poly[i].0 * &poly[j].1 - &poly[j].0 * &poly[i].1;
    }
    s
}

/// Whether some point of the polygon lies strictly inside the disk.
pub(crate) fn meets_open_disk(m: &Rational, poly: &[Pt], d: &Disk) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let c = (d.cx.clone(), d.cy.clone());
    if (0..n).all(|i| !cross(&poly[i], &poly[(i + 1) % n], &c).is_negative()) {
        return true;
    }
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        let ex = &q.0 - &p.0;
        let ey = &q.1 - &p.1;
        let wx = &c.0 - &p.0;
        let wy = &c.1 - &p.1;
        // Euclidean inner products in the chart metric dx^2 + m dy^2
        let dot = &ex * &wx + m * &ey * &wy;
        let len = &ex * &ex + m * &ey * &ey;
        let t = if dot.is_negative() {
            Rational::zero()
        } else if dot > len {
            Rational::one()
        } else {
            dot / &len
        };
        let pt = (&p.0 + &t * &ex, &p.1 + &t * &ey);
        if d.power(m, &pt).is_negative() {
            return true;
        }
    }
    false
}

/// A rational box containing the disk.
pub(crate) fn bounding_box(ring: Ring, d: &Disk) -> Vec<Pt> {
    // r <= 1/floor(sqrt(N)) with N = 1/r^2 >= 1
    let n = (Rational::one() / &d.r2).floor().to_integer();
    let sn = n.sqrt().max(BigInt::one());
    let sm = BigInt::from(ring.m()).sqrt();
    let hx = Rational::new(BigInt::one(), sn.clone());
    let hy = Rational::new(BigInt::one(), &sn * &sm);
    vec![
        (&d.cx - &hx, &d.cy - &hy),
        (&d.cx + &hx, &d.cy - &hy),
        (&d.cx + &hx, &d.cy + &hy),
        (&d.cx - &hx, &d.cy + &hy),
    ]
}

/// Neighbors of `d` among the translates of `list`: translates whose open
/// disks overlap the open disk of `d`, excluding `d` itself.
pub(crate) fn neighbors(
    ring: Ring,
    list: &[Hemisphere],
    index: &PeriodicIndex,
    d: &Disk,
) -> Vec<(usize, Shift, Disk)> {
    let m = Rational::from_integer(BigInt::from(ring.m()));
    let r = rat_to_f64(&d.r2).sqrt();
    let mut out = Vec::new();
    for (idx, t) in index.query(rat_to_f64(&d.cx), rat_to_f64(&d.cy), r) {
        let other = Disk::new(ring, &list[idx], t);
        if other.same_as(d) || !d.overlaps(&m, &other) {
            continue;
        }
        out.push((idx, t, other));
    }
    out
}

/// The power cell of `d` against the given neighbors, clipped to its bounding box.
pub(crate) fn power_cell(ring: Ring, d: &Disk, nbrs: &[(usize, Shift, Disk)]) -> Vec<Pt> {
    let m = Rational::from_integer(BigInt::from(ring.m()));
    let mut poly = bounding_box(ring, d);
    // clip by the largest neighbors first; they cut away the most
    let mut order: Vec<usize> = (0..nbrs.len()).collect();
    order.sort_by(|&a, &b| nbrs[b].2.r2.cmp(&nbrs[a].2.r2).then(a.cmp(&b)));
    for i in order {
        let h = HalfPlane::bisector(&m, d, &nbrs[i].2);
        poly = clip(&poly, &h);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    if area2(&poly).is_positive() {
        poly
    } else {
        Vec::new()
    }
}

pub(crate) fn pt_to_kelem(ring: Ring, p: &Pt) -> KElem {
    KElem::new(ring, p.0.clone(), p.1.clone())
}

/// Floating point power cell test with a safety margin: false only if the
/// hemisphere is certainly nowhere strictly above its neighbors and the plane.
pub(crate) fn may_poke_above_f64(m: f64, c: (f64, f64), r2: f64, nbrs: &[(f64, f64, f64)]) -> bool {
    let eps = super::index::MARGIN;
    let r = r2.sqrt();
    let sm = m.sqrt();
    let mut poly: Vec<(f64, f64)> = vec![
        (c.0 - r, c.1 - r / sm),
        (c.0 + r, c.1 - r / sm),
        (c.0 + r, c.1 + r / sm),
        (c.0 - r, c.1 + r / sm),
    ];
    let k_s = c.0 * c.0 + m * c.1 * c.1 - r2;
    for &(tx, ty, tr2) in nbrs {
        let a = 2.0 * (tx - c.0);
        let b = 2.0 * m * (ty - c.1);
        let cc = k_s - (tx * tx + m * ty * ty - tr2);
        let scale = a.abs() + b.abs() + 1.0;
        let vals: Vec<f64> = poly
            .iter()
            .map(|p| a * p.0 + b * p.1 + cc - eps * scale)
            .collect();
        if vals.iter().all(|v| *v <= 0.0) {
            continue;
        }
        let n = poly.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            if vals[i] <= 0.0 {
                out.push(poly[i]);
            }
            if (vals[i] < 0.0 && vals[j] > 0.0) || (vals[i] > 0.0 && vals[j] < 0.0) {
                let t = vals[i] / (vals[i] - vals[j]);
                out.push((
                    poly[i].0 + t * (poly[j].0 - poly[i].0),
                    poly[i].1 + t * (poly[j].1 - poly[i].1),
                ));
            }
        }
        poly = out;
        if poly.is_empty() {
            return false;
        }
    }
    // does the enlarged cell reach into the disk?
    let n = poly.len();
    let inside = (0..n).all(|i| {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        (q.0 - p.0) * (c.1 - p.1) - (q.1 - p.1) * (c.0 - p.0) >= -eps
    });
    if inside && n >= 3 {
        return true;
    }
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (ex, ey) = (q.0 - p.0, q.1 - p.1);
        let (wx, wy) = (c.0 - p.0, c.1 - p.1);
        let len = ex * ex + m * ey * ey;
        let t = if len > 0.0 {
            ((ex * wx + m * ey * wy) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (dx, dy) = (p.0 + t * ex - c.0, p.1 + t * ey - c.1);
        if dx * dx + m * dy * dy < r2 + eps {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn clipping_square() {
        let sq: Vec<Pt> = vec![
            (int(0), int(0)),
            (int(1), int(0)),
            (int(1), int(1)),
            (int(0), int(1)),
        ];
        assert_eq!(area2(&sq), int(2));
        // x <= 1/2
        let h = HalfPlane {
            a: int(1),
            b: int(0),
            c: rat(-1, 2),
        };
        let c = clip(&sq, &h);
        assert_eq!(area2(&c), int(1));
        assert_eq!(c.len(), 4);
        // x + y <= 0 leaves a point
        let h = HalfPlane {
            a: int(1),
            b: int(1),
            c: int(0),
        };
        assert!(clip(&sq, &h).len() < 3);
    }

    #[test]
    fn unit_cell_for_m2() {
        let ring = Ring::new(2).unwrap();
        let list = vec![Hemisphere::new(ring.one(), ring.zero()).unwrap()];
        let mut idx = PeriodicIndex::new(ring, 0.25);
        idx.insert(0, &list[0]);
        let d = Disk::new(ring, &list[0], (0, 0));
        let nb = neighbors(ring, &list, &idx, &d);
        let cell = power_cell(ring, &d, &nb);
        // lattice Voronoi cell: |x| <= 1/2, |y| <= 1/2 in the chart
        assert_eq!(area2(&cell), int(2));
        assert!(cell.contains(&(rat(1, 2), rat(1, 2))));
    }
}
