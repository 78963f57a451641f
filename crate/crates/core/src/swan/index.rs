//! Floating point acceleration structures. They only ever decide which exact
//! tests to run; every decision that reaches the output is made exactly,
//! except the rejection of candidates that lie below the current surface by
//! more than `MARGIN`.

use crate::arith::{rat_to_f64, KElem, Ring};
use crate::geometry::Hemisphere;
use num_traits::ToPrimitive;
use std::collections::HashSet;

pub(crate) const MARGIN: f64 = 1e-9;

/// Translation by `r + w*omega`.
pub(crate) type Shift = (i64, i64);

/// O-coordinates of `sx + sy*sqrt(-m)`.
pub(crate) fn chart_shift_to_o(ring: Ring, sx: i64, sy: i64) -> Shift {
    if ring.is_three_mod_four() {
        (sx + sy, 2 * sy)
    } else {
        (sx, sy)
    }
}

pub(crate) fn shift_elem(ring: Ring, s: Shift) -> KElem {
    ring.elem(s.0, s.1)
}

fn floor_i64(q: &crate::arith::Rational) -> i64 {
    q.floor()
        .to_integer()
        .to_i64()
        .expect("coordinate out of range")
}

/// Representatives of `center + O` in the chart torus `[0,1)^2` modulo `Z + Z sqrt(-m)`,
/// as translations applied to `center`.
pub(crate) fn torus_reps(center: &KElem) -> Vec<Shift> {
    let ring = center.ring();
    let mut out = Vec::new();
    let mut starts = vec![(0i64, 0i64)];
    if ring.is_three_mod_four() {
        starts.push((0, 1));
    }
    for s in starts {
        let c = center + &shift_elem(ring, s);
        let fx = floor_i64(c.x());
        let fy = floor_i64(c.y());
        let extra = chart_shift_to_o(ring, -fx, -fy);
        out.push((s.0 + extra.0, s.1 + extra.1));
    }
    out
}

#[derive(Clone, Debug)]
struct Rep {
    idx: usize,
    cx: f64,
    cy: f64,
    shift: Shift,
}

/// Bucket grid on the chart torus holding every list hemisphere in each bucket its disk meets.
#[derive(Clone, Debug)]
pub(crate) struct PeriodicIndex {
    ring: Ring,
    sqrt_m: f64,
    nx: i64,
    ny: i64,
    buckets: Vec<Vec<(u32, i32, i32)>>,
    reps: Vec<Rep>,
}

impl PeriodicIndex {
    pub fn new(ring: Ring, cell: f64) -> Self {
        let sqrt_m = (ring.m() as f64).sqrt();
        let nx = (1.0 / cell).ceil().max(1.0) as i64;
        let ny = (sqrt_m / cell).ceil().max(1.0) as i64;
        PeriodicIndex {
            ring,
            sqrt_m,
            nx,
            ny,
            buckets: vec![Vec::new(); (nx * ny) as usize],
            reps: Vec::new(),
        }
    }

    fn range(&self, cx: f64, cy: f64, r: f64) -> (i64, i64, i64, i64) {
        let rx = r + 1e-9;
        let ry = r / self.sqrt_m + 1e-9;
        let nx = self.nx as f64;
        let ny = self.ny as f64;
        (
            ((cx - rx) * nx).floor() as i64,
            ((cx + rx) * nx).floor() as i64,
            ((cy - ry) * ny).floor() as i64,
            ((cy + ry) * ny).floor() as i64,
        )
    }

    pub fn insert(&mut self, idx: usize, h: &Hemisphere) {
        let r = h.radius_f64();
        for shift in torus_reps(h.center()) {
            let c = h.center() + &shift_elem(self.ring, shift);
            let (cx, cy) = (rat_to_f64(c.x()), rat_to_f64(c.y()));
            let rep_id = self.reps.len() as u32;
            self.reps.push(Rep { idx, cx, cy, shift });
            let (i0, i1, j0, j1) = self.range(cx, cy, r);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let b = (i.rem_euclid(self.nx) * self.ny + j.rem_euclid(self.ny)) as usize;
                    let ox = -i.div_euclid(self.nx) as i32;
                    let oy = -j.div_euclid(self.ny) as i32;
                    self.buckets[b].push((rep_id, ox, oy));
                }
            }
        }
    }

    /// Candidate `(entry, translation)` pairs whose disks may meet the disk of
    /// radius `r` around the chart point `(cx, cy)`. Sorted and deduplicated.
    pub fn query(&self, cx: f64, cy: f64, r: f64) -> Vec<(usize, Shift)> {
        let (i0, i1, j0, j1) = self.range(cx, cy, r);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                let b = (i.rem_euclid(self.nx) * self.ny + j.rem_euclid(self.ny)) as usize;
                let bx = i.div_euclid(self.nx);
                let by = j.div_euclid(self.ny);
                for &(rep_id, ox, oy) in &self.buckets[b] {
                    let key = (rep_id, ox as i64 + bx, oy as i64 + by);
                    if seen.insert(key) {
                        let rep = &self.reps[rep_id as usize];
                        let extra = chart_shift_to_o(self.ring, key.1, key.2);
                        out.push((rep.idx, (rep.shift.0 + extra.0, rep.shift.1 + extra.1)));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Chart position of a representative, for diagnostics.
    #[allow(dead_code)]
    pub fn rep_positions(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.reps.iter().map(|r| (r.idx, r.cx, r.cy))
    }
}

/// Lower bounds for the squared height of the current surface on a fine grid of the chart torus.
#[derive(Clone, Debug)]
pub(crate) struct LowerBoundGrid {
    m: f64,
    sqrt_m: f64,
    nx: i64,
    ny: i64,
    lb: Vec<f64>,
}

impl LowerBoundGrid {
    pub fn new(ring: Ring, cell: f64) -> Self {
        let sqrt_m = (ring.m() as f64).sqrt();
        let nx = (1.0 / cell).ceil().max(1.0) as i64;
        let ny = (sqrt_m / cell).ceil().max(1.0) as i64;
        LowerBoundGrid {
            m: ring.m() as f64,
            sqrt_m,
            nx,
            ny,
            lb: vec![f64::NEG_INFINITY; (nx * ny) as usize],
        }
    }

    fn cell_rect(&self, i: i64, j: i64) -> (f64, f64, f64, f64) {
        let nx = self.nx as f64;
        let ny = self.ny as f64;
        (
            i as f64 / nx,
            (i + 1) as f64 / nx,
            j as f64 / ny,
            (j + 1) as f64 / ny,
        )
    }

    fn range(&self, cx: f64, cy: f64, r: f64) -> (i64, i64, i64, i64) {
        let nx = self.nx as f64;
        let ny = self.ny as f64;
        let ry = r / self.sqrt_m;
        (
            ((cx - r) * nx).floor() as i64,
            ((cx + r) * nx).floor() as i64,
            ((cy - ry) * ny).floor() as i64,
            ((cy + ry) * ny).floor() as i64,
        )
    }

    /// Records the hemisphere with chart center `(cx, cy)` and squared radius `r2`.
    pub fn add(&mut self, cx: f64, cy: f64, r2: f64) {
        let r = r2.sqrt();
        let (i0, i1, j0, j1) = self.range(cx, cy, r);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let (x0, x1, y0, y1) = self.cell_rect(i, j);
                let dx = (cx - x0).abs().max((cx - x1).abs());
                let dy = (cy - y0).abs().max((cy - y1).abs());
                let v = r2 - (dx * dx + self.m * dy * dy) - MARGIN * 1e-3;
                if v > 0.0 {
                    let b = (i.rem_euclid(self.nx) * self.ny + j.rem_euclid(self.ny)) as usize;
                    if v > self.lb[b] {
                        self.lb[b] = v;
                    }
                }
            }
        }
    }

    /// False only if the hemisphere is certainly not above the surface anywhere.
    pub fn may_poke_above(&self, cx: f64, cy: f64, r2: f64) -> bool {
        let r = r2.sqrt();
        let (i0, i1, j0, j1) = self.range(cx, cy, r);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let (x0, x1, y0, y1) = self.cell_rect(i, j);
                let dx = if cx < x0 {
                    x0 - cx
                } else if cx > x1 {
                    cx - x1
                } else {
                    0.0
                };
                let dy = if cy < y0 {
                    y0 - cy
                } else if cy > y1 {
                    cy - y1
                } else {
                    0.0
                };
                let v = r2 - (dx * dx + self.m * dy * dy);
                let b = (i.rem_euclid(self.nx) * self.ny + j.rem_euclid(self.ny)) as usize;
                if v > -MARGIN && v > self.lb[b] - MARGIN {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_finds_translates() {
        for m in [2, 7, 19] {
            let ring = Ring::new(m).unwrap();
            let h = Hemisphere::new(ring.one(), ring.zero()).unwrap();
            let mut idx = PeriodicIndex::new(ring, 0.25);
            idx.insert(0, &h);
            // near z = 1 the translate by 1 must be reported
            let hits = idx.query(1.0, 0.0, 0.1);
            assert!(hits.contains(&(0, (1, 0))), "{m}: {hits:?}");
            let hits = idx.query(-0.5, 0.0, 0.1);
            assert!(hits.contains(&(0, (0, 0))));
            assert!(hits.contains(&(0, (-1, 0))));
        }
    }

    #[test]
    fn lower_bound_grid_rejects_covered() {
        let ring = Ring::new(2).unwrap();
        let mut g = LowerBoundGrid::new(ring, 1.0 / 64.0);
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            g.add(x, y, 1.0);
        }
        assert!(!g.may_poke_above(0.1, 0.1, 0.01));
        assert!(g.may_poke_above(0.1, 0.1, 1.5));
    }
}
