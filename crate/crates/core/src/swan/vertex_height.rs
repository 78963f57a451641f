//! Minimal vertex height computed directly from agreement lines, hemisphere by
//! hemisphere. Quadratic in the list length; used to cross-check the power
//! diagram on small fields.

use super::nearby_translates;
use super::singular::SingularPoint;
use crate::arith::{Rational, Ring};
use crate::geometry::{
    agreement_line, defect, reduce_to_rectangle, touching, Hemisphere, UhsPoint,
};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct VertexHeightResult {
    /// Lowest squared height of a non-singular vertex.
    pub zeta2: Option<Rational>,
    /// Hemispheres with at least three surviving intersection points.
    pub kept: Vec<Hemisphere>,
    /// Hemispheres with one or two surviving points (they carry edges only).
    pub side: Vec<Hemisphere>,
    /// Number of hemispheres without surviving points.
    pub erased: usize,
    /// Surviving points reduced into `D0`, cusps included.
    pub vertices: Vec<UhsPoint>,
}

fn touching_translates(ring: Ring, s: &Hemisphere, list: &[Hemisphere]) -> Vec<Hemisphere> {
    let mut out = Vec::new();
    for t in list {
        for shift in nearby_translates(ring, &(s.center() - t.center())) {
            let u = t.translate(&shift);
            if u != *s && touching(s, &u) {
                out.push(u);
            }
        }
    }
    out
}

pub fn minimal_vertex_height(
    ring: Ring,
    list: &[Hemisphere],
    singular: &[SingularPoint],
) -> VertexHeightResult {
    let per: Vec<Vec<UhsPoint>> = list
        .par_iter()
        .map(|s| {
            let nb = touching_translates(ring, s, list);
            let lines: Vec<_> = nb
                .iter()
                .filter_map(|t| agreement_line(s, t).ok())
                .collect();
            let mut pts = BTreeSet::new();
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let Some(z) = lines[i].intersect(&lines[j]) else {
                        continue;
                    };
                    let f = defect(s, &z);
                    if f.is_positive() {
                        continue;
                    }
                    if nb.iter().any(|t| defect(t, &z) < f) {
                        continue;
                    }
                    pts.insert(UhsPoint::new(z, -f));
                }
            }
            pts.into_iter().collect()
        })
        .collect();
    let mut kept = Vec::new();
    let mut side = Vec::new();
    let mut erased = 0;
    let mut verts = BTreeSet::new();
    let mut zeta2: Option<Rational> = None;
    for (s, pts) in list.iter().zip(per) {
        match pts.len() {
            0 => erased += 1,
            1 | 2 => side.push(s.clone()),
            _ => kept.push(s.clone()),
        }
        for p in pts {
            let (z, _) = reduce_to_rectangle(&p.z);
            if p.h2.is_zero() {
                debug_assert!(singular.iter().any(|q| q.value == z));
            } else if zeta2.as_ref().map_or(true, |m| &p.h2 < m) {
                zeta2 = Some(p.h2.clone());
            }
            verts.insert(UhsPoint::new(z, p.h2));
        }
    }
    VertexHeightResult {
        zeta2,
        kept,
        side,
        erased,
        vertices: verts.into_iter().collect(),
    }
}
