//! Swan's algorithm for the hemispheres bounding the Bianchi fundamental polyhedron.
//!
//! Norms `|mu|^2` are processed in ascending order. A hemisphere is recorded
//! when it is strictly above the current surface somewhere (or, in
//! [`Pruning::EverywhereBelow`] mode, when it is not everywhere below a single
//! recorded hemisphere). Periodically the exact power diagram of the list is
//! computed; the run stops once the plane is covered and the lowest vertex has
//! height at least `1/N` where `N^2` is the next unprocessed norm.

pub(crate) mod index;
mod norms;
pub(crate) mod power;
mod singular;
mod vertex_height;

pub use norms::{elements_of_norm, norm_values_up_to, norms_in_range};
pub use singular::{singular_points, SingularPoint};
pub use vertex_height::{minimal_vertex_height, VertexHeightResult};

use crate::arith::{
    is_unimodular_int, lattice_hnf, rat_to_f64, FieldContext, KElem, Rational, Ring,
};
use crate::geometry::{defect, everywhere_below, reduce_to_rectangle, Hemisphere, UhsPoint};
use index::{torus_reps, LowerBoundGrid, PeriodicIndex, Shift};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use power::{meets_open_disk, neighbors, power_cell, Disk, Pt};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SwanError {
    #[error("no termination after {0} rounds")]
    IterationCap(usize),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

/// Which hemispheres are kept while scanning a norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pruning {
    /// Keep a hemisphere unless it is everywhere below a single recorded one.
    EverywhereBelow,
    /// Keep a hemisphere only if it is strictly above the current surface somewhere.
    PowerCell,
}

#[derive(Clone, Debug)]
pub struct SwanConfig {
    pub pruning: Pruning,
    pub max_rounds: usize,
    /// Bucket size of the neighbor index (Euclidean).
    pub index_cell: f64,
    /// Cell size of the height lower-bound grid (Euclidean).
    pub grid_cell: f64,
}

impl Default for SwanConfig {
    fn default() -> Self {
        SwanConfig {
            pruning: Pruning::PowerCell,
            max_rounds: 64,
            index_cell: 0.25,
            grid_cell: 1.0 / 64.0,
        }
    }
}

/// The initial estimate for the largest `|mu|` needed.
pub fn e_estimate(ctx: &FieldContext) -> Rational {
    let m = Rational::from_integer(BigInt::from(ctx.m()));
    let h = Rational::from_integer(BigInt::from(ctx.class_number as i64));
    if ctx.ring.is_three_mod_four() {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        &m * &half * Rational::from_integer(BigInt::from(5)) * &h
            - Rational::from_integer(BigInt::from(2)) * &m
            + half
    } else {
        Rational::from_integer(BigInt::from(21)) * &m * &h
            - Rational::from_integer(BigInt::from(19)) * &m
    }
}

#[derive(Clone, Debug)]
pub struct HemisphereList {
    pub entries: Vec<Hemisphere>,
    /// Largest processed value of `|mu|^2`.
    pub norm_cursor: i64,
    /// Current bound `E^2` on `|mu|^2`.
    pub e2: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationLog {
    pub processed_up_to: i64,
    pub list_len: usize,
    pub covered: bool,
    pub min_height2: Option<String>,
    pub next_norm: i64,
    pub terminated: bool,
}

/// Output of [`compute_polyhedron`].
#[derive(Clone, Debug)]
pub struct Polyhedron {
    pub ctx: FieldContext,
    /// Hemispheres carrying a 2-cell of the boundary, centers in `D0`.
    pub list: HemisphereList,
    /// Counterclockwise corners of the 2-cell of each list entry.
    pub cells: Vec<Vec<KElem>>,
    /// Vertices of the boundary modulo translations, in `D0`, singular points excluded.
    pub vertices: Vec<UhsPoint>,
    pub singular: Vec<SingularPoint>,
    pub min_height2: Rational,
    /// Smallest norm value not processed.
    pub next_norm: i64,
    pub log: Vec<IterationLog>,
}

impl Polyhedron {
    pub fn max_mu_norm(&self) -> Rational {
        self.list
            .entries
            .iter()
            .map(|h| h.mu_norm())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// A list hemisphere (possibly translated) strictly above `z`, if any.
    pub fn covering_hemisphere(&self, z: &KElem) -> Option<Hemisphere> {
        let ring = self.ctx.ring;
        for h in &self.list.entries {
            for t in nearby_translates(ring, &(z - h.center())) {
                let ht = h.translate(&t);
                if defect(&ht, z).is_negative() {
                    return Some(ht);
                }
            }
        }
        None
    }

    /// Vertex/hemisphere pairs where the vertex is strictly below the hemisphere
    /// or one of its translates. Empty for a correct polyhedron.
    pub fn certificate_violations(&self) -> Vec<(UhsPoint, Hemisphere)> {
        let ring = self.ctx.ring;
        let pairs: Vec<(usize, usize)> = (0..self.vertices.len())
            .flat_map(|v| (0..self.list.entries.len()).map(move |s| (v, s)))
            .collect();
        pairs
            .par_iter()
            .filter_map(|&(v, s)| {
                let p = &self.vertices[v];
                let h = &self.list.entries[s];
                for t in nearby_translates(ring, &(&p.z - h.center())) {
                    let ht = h.translate(&t);
                    if p.h2 < -defect(&ht, &p.z) {
                        return Some((p.clone(), ht));
                    }
                }
                None
            })
            .collect()
    }

    pub fn is_singular(&self, z: &KElem) -> bool {
        let (w, _) = reduce_to_rectangle(z);
        self.singular.iter().any(|s| s.value == w)
    }
}

/// Translations `t` for which `d + t` can be within distance 1 of the origin.
pub(crate) fn nearby_translates(ring: Ring, d: &KElem) -> Vec<KElem> {
    let (_, t0) = reduce_to_rectangle(d);
    let mut out = Vec::with_capacity(25);
    for a in -2..=2 {
        for b in -2..=2 {
            out.push(&t0 + &ring.elem(a, b));
        }
    }
    out
}

struct Builder {
    ring: Ring,
    cfg: SwanConfig,
    entries: Vec<Hemisphere>,
    alive: Vec<bool>,
    index: PeriodicIndex,
    grid: LowerBoundGrid,
    m_q: Rational,
}

struct Candidate {
    mu: (i64, i64),
    lambda: (i64, i64),
}

struct DiagramState {
    cells: Vec<Vec<Pt>>,
    covered: bool,
    min_h2: Option<Rational>,
}

impl Builder {
    fn new(ctx: &FieldContext, cfg: SwanConfig) -> Self {
        let ring = ctx.ring;
        Builder {
            ring,
            index: PeriodicIndex::new(ring, cfg.index_cell),
            grid: LowerBoundGrid::new(ring, cfg.grid_cell),
            cfg,
            entries: Vec::new(),
            alive: Vec::new(),
            m_q: Rational::from_integer(BigInt::from(ctx.m())),
        }
    }

    fn alive_neighbors(&self, d: &Disk) -> Vec<(usize, Shift, Disk)> {
        neighbors(self.ring, &self.entries, &self.index, d)
            .into_iter()
            .filter(|(i, _, _)| self.alive[*i])
            .collect()
    }

    fn push(&mut self, h: Hemisphere) {
        let idx = self.entries.len();
        self.index.insert(idx, &h);
        let r2 = rat_to_f64(h.r2());
        for t in torus_reps(h.center()) {
            let c = h.center() + &index::shift_elem(self.ring, t);
            self.grid.add(rat_to_f64(c.x()), rat_to_f64(c.y()), r2);
        }
        self.entries.push(h);
        self.alive.push(true);
    }

    /// Chart center of `lambda/mu` in floating point.
    fn center_f64(&self, mu: (i64, i64), lambda: (i64, i64), n: i64) -> (f64, f64) {
        let (cr, cw) = self.ring.conj_int(mu.0 as i128, mu.1 as i128);
        let (r, w) = self
            .ring
            .mul_int((lambda.0 as i128, lambda.1 as i128), (cr, cw));
        let n = n as f64;
        if self.ring.is_three_mod_four() {
            ((r as f64 - w as f64 / 2.0) / n, (w as f64 / 2.0) / n)
        } else {
            (r as f64 / n, w as f64 / n)
        }
    }

    /// Floating point screening of a candidate against the current list.
    fn screen(&self, mu: (i64, i64), lambda: (i64, i64), n: i64) -> bool {
        let (cx, cy) = self.center_f64(mu, lambda, n);
        let r2 = 1.0 / n as f64;
        match self.cfg.pruning {
            Pruning::PowerCell => {
                if !self.grid.may_poke_above(cx, cy, r2) {
                    return false;
                }
                if !is_unimodular_int(self.ring, mu, lambda) {
                    return false;
                }
                let r = r2.sqrt();
                let m = self.ring.m() as f64;
                let mut nb = Vec::new();
                for (i, t) in self.index.query(cx, cy, r) {
                    if !self.alive[i] {
                        continue;
                    }
                    let h = &self.entries[i];
                    let c = h.center();
                    let (tx, ty) = {
                        let s = index::shift_elem(self.ring, t);
                        (
                            rat_to_f64(c.x()) + rat_to_f64(s.x()),
                            rat_to_f64(c.y()) + rat_to_f64(s.y()),
                        )
                    };
                    nb.push((tx, ty, rat_to_f64(h.r2())));
                }
                power::may_poke_above_f64(m, (cx, cy), r2, &nb)
            }
            Pruning::EverywhereBelow => is_unimodular_int(self.ring, mu, lambda),
        }
    }

    fn hemisphere_of(&self, c: &Candidate) -> Hemisphere {
        let mu = self.ring.elem(c.mu.0, c.mu.1);
        let lambda = self.ring.elem(c.lambda.0, c.lambda.1);
        let center = lambda.div(&mu).expect("mu nonzero");
        let (_, t) = reduce_to_rectangle(&center);
        Hemisphere::new_unchecked(mu.clone(), &lambda + &(&mu * &t))
    }

    /// Exact acceptance test against the current list.
    fn accepts(&self, h: &Hemisphere) -> bool {
        let d = Disk::new(self.ring, h, (0, 0));
        let nb = self.alive_neighbors(&d);
        if nb.iter().any(|(_, _, o)| o.same_as(&d)) {
            return false;
        }
        match self.cfg.pruning {
            Pruning::PowerCell => {
                let poly = power_cell(self.ring, &d, &nb);
                !poly.is_empty() && meets_open_disk(&self.m_q, &poly, &d)
            }
            Pruning::EverywhereBelow => !nb.iter().any(|(i, t, _)| {
                let other = self.entries[*i].translate(&index::shift_elem(self.ring, *t));
                everywhere_below(h, &other)
            }),
        }
    }

    /// Records the hemispheres of the given norms.
    fn record_norms(&mut self, norms: &[i64]) {
        let ring = self.ring;
        let mut jobs: Vec<(i64, (i64, i64))> = Vec::new();
        for &n in norms {
            for mu in elements_of_norm(ring, n) {
                jobs.push((n, mu));
            }
        }
        let this = &*self;
        let found: Vec<Vec<Candidate>> = jobs
            .par_iter()
            .map(|&(n, mu)| {
                let (a, b) = ring.mul_omega_int(mu.0 as i128, mu.1 as i128);
                let gens = [
                    (BigInt::from(mu.0), BigInt::from(mu.1)),
                    (BigInt::from(a), BigInt::from(b)),
                ];
                let ((p, _), (_, s)) = lattice_hnf(&gens).expect("mu nonzero");
                let p = p.to_i64().unwrap();
                let s = s.to_i64().unwrap();
                let mut out = Vec::new();
                for i in 0..p {
                    for j in 0..s {
                        if this.screen(mu, (i, j), n) {
                            let c = Candidate { mu, lambda: (i, j) };
                            let h = this.hemisphere_of(&c);
                            if this.accepts(&h) {
                                out.push(c);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        // sequential merge in scan order; re-check when a hemisphere added in
        // this batch overlaps the candidate
        let first_new = self.entries.len();
        for c in found.into_iter().flatten() {
            let h = self.hemisphere_of(&c);
            let d = Disk::new(ring, &h, (0, 0));
            let recheck = self
                .alive_neighbors(&d)
                .iter()
                .any(|(i, _, _)| *i >= first_new);
            if !recheck || self.accepts(&h) {
                self.push(h);
            }
        }
    }

    /// Exact power diagram of the live entries.
    fn diagram(&mut self, singular: &[SingularPoint]) -> DiagramState {
        let ring = self.ring;
        let live: Vec<usize> = (0..self.entries.len()).filter(|&i| self.alive[i]).collect();
        let this = &*self;
        let cells: Vec<Vec<Pt>> = live
            .par_iter()
            .map(|&i| {
                let d = Disk::new(ring, &this.entries[i], (0, 0));
                let nb = this.alive_neighbors(&d);
                power_cell(ring, &d, &nb)
            })
            .collect();
        let mut covered = true;
        let mut min_h2: Option<Rational> = None;
        for (k, &i) in live.iter().enumerate() {
            let d = Disk::new(ring, &self.entries[i], (0, 0));
            for p in &cells[k] {
                let f = d.power(&self.m_q, p);
                if f.is_positive() {
                    covered = false;
                } else if f.is_zero() {
                    let z = power::pt_to_kelem(ring, p);
                    let (w, _) = reduce_to_rectangle(&z);
                    if !singular.iter().any(|s| s.value == w) {
                        covered = false;
                    }
                } else {
                    let h2 = -f;
                    if min_h2.as_ref().map_or(true, |m| &h2 < m) {
                        min_h2 = Some(h2);
                    }
                }
            }
        }
        // entries without a 2-cell contribute nothing to the surface
        let mut kept = Vec::new();
        for (k, &i) in live.iter().enumerate() {
            if cells[k].is_empty() {
                self.alive[i] = false;
            } else {
                kept.push(cells[k].clone());
            }
        }
        DiagramState {
            cells: kept,
            covered,
            min_h2,
        }
    }
}

/// Runs Swan's algorithm with the default configuration.
pub fn compute_polyhedron(ctx: &FieldContext) -> Result<Polyhedron, SwanError> {
    compute_polyhedron_with(ctx, &SwanConfig::default())
}

pub fn compute_polyhedron_with(
    ctx: &FieldContext,
    cfg: &SwanConfig,
) -> Result<Polyhedron, SwanError> {
    let ring = ctx.ring;
    let singular = singular_points(ctx);
    let mut b = Builder::new(ctx, cfg.clone());
    let e = e_estimate(ctx);
    let mut e2 = (&e * &e).max(Rational::one());
    let mut processed = 0i64;
    let mut last_check = 0i64;
    let mut log = Vec::new();
    for _round in 0..cfg.max_rounds {
        let target = e2.floor().to_integer().to_i64().unwrap_or(i64::MAX);
        // process up to the target, checking for termination whenever the
        // processed range has doubled
        loop {
            let stage_hi = if processed < target {
                target.min((2 * processed).max(16))
            } else {
                processed
            };
            if stage_hi > processed {
                let norms = norms_in_range(ring, processed, stage_hi);
                b.record_norms(&norms);
                processed = stage_hi;
            }
            let at_target = processed >= target;
            if !at_target && processed < 2 * last_check.max(8) {
                continue;
            }
            last_check = processed;
            let state = b.diagram(&singular);
            let next = next_norm_after(ring, processed);
            let terminated = state.covered
                && state.min_h2.as_ref().map_or(false, |h| {
                    h * Rational::from_integer(BigInt::from(next)) >= Rational::one()
                });
            log.push(IterationLog {
                processed_up_to: processed,
                list_len: state.cells.len(),
                covered: state.covered,
                min_height2: state.min_h2.as_ref().map(crate::report::rational_string),
                next_norm: next,
                terminated,
            });
            if terminated {
                return finish(ctx, b, state, singular, processed, next, log);
            }
            if at_target {
                e2 = if state.covered {
                    let h = state.min_h2.clone().expect("covered lists have vertices");
                    (Rational::one() / h).max(Rational::from_integer(BigInt::from(next)))
                } else {
                    e2 * Rational::from_integer(BigInt::from(4))
                };
                break;
            }
        }
    }
    Err(SwanError::IterationCap(cfg.max_rounds))
}

fn next_norm_after(ring: Ring, n: i64) -> i64 {
    let mut hi = n + 8;
    loop {
        let v = norms_in_range(ring, n, hi);
        if let Some(&x) = v.first() {
            return x;
        }
        hi *= 2;
    }
}

fn finish(
    ctx: &FieldContext,
    b: Builder,
    state: DiagramState,
    singular: Vec<SingularPoint>,
    processed: i64,
    next: i64,
    log: Vec<IterationLog>,
) -> Result<Polyhedron, SwanError> {
    let ring = ctx.ring;
    let m_q = b.m_q.clone();
    let live: Vec<usize> = (0..b.entries.len()).filter(|&i| b.alive[i]).collect();
    if live.len() != state.cells.len() {
        return Err(SwanError::Consistency("cell count mismatch".into()));
    }
    let mut pairs: Vec<(Hemisphere, Vec<Pt>)> = live
        .iter()
        .zip(state.cells)
        .map(|(&i, c)| (b.entries[i].clone(), c))
        .collect();
    pairs.sort_by(|a, b| {
        a.0.mu_norm()
            .cmp(&b.0.mu_norm())
            .then_with(|| a.0.center().lex_cmp(b.0.center()))
    });
    let mut verts: BTreeSet<UhsPoint> = BTreeSet::new();
    for (h, poly) in &pairs {
        let d = Disk::new(ring, h, (0, 0));
        for p in poly {
            let f = d.power(&m_q, p);
            if f.is_negative() {
                let (z, _) = reduce_to_rectangle(&power::pt_to_kelem(ring, p));
                verts.insert(UhsPoint::new(z, -f));
            }
        }
    }
    let min_height2 = verts
        .iter()
        .map(|v| v.h2.clone())
        .min()
        .ok_or_else(|| SwanError::Consistency("no vertices".into()))?;
    let cells = pairs
        .iter()
        .map(|(_, poly)| poly.iter().map(|p| power::pt_to_kelem(ring, p)).collect())
        .collect();
    Ok(Polyhedron {
        ctx: ctx.clone(),
        list: HemisphereList {
            entries: pairs.into_iter().map(|(h, _)| h).collect(),
            norm_cursor: processed,
            e2: Rational::from_integer(BigInt::from(processed)),
        },
        cells,
        vertices: verts.into_iter().collect(),
        singular,
        min_height2,
        next_norm: next,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{field_context, int};

    #[test]
    fn e_estimates() {
        assert_eq!(e_estimate(&field_context(2).unwrap()), int(4));
        assert_eq!(e_estimate(&field_context(7).unwrap()), int(4));
        assert_eq!(e_estimate(&field_context(5).unwrap()), int(115));
    }

    #[test]
    fn m2_polyhedron() {
        let ctx = field_context(2).unwrap();
        let p = compute_polyhedron(&ctx).unwrap();
        assert!(p.certificate_violations().is_empty());
        assert!(p.max_mu_norm() <= Rational::new(BigInt::from(81), BigInt::from(4)));
        assert!(
            p.min_height2.clone() * Rational::from_integer(BigInt::from(p.next_norm)) >= int(1)
        );
    }
}
