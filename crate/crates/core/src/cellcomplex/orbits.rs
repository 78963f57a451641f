//! Orbits of cells under `SL_2(O)`.
//!
//! Every cell is known by its vertex set. For a cell `V` and each vertex `a`
//! of `V` with finite stabilizer, let `g_a` map `a` to the representative `R`
//! of its orbit. The images `s g_a V` for `s` in `Stab(R)`, moved into
//! canonical position by a translation, are all cells of the orbit of `V`
//! having a vertex at `R`, and every element mapping `V` into canonical
//! position at `R` is among them. The smallest image is therefore an orbit
//! invariant, and the elements attaining it give identification and stabilizer.

use super::group::GroupElement;
use super::identify::{identification_matrices, point_stabilizer};
use super::vertex::{canonical_position, cell_key, Vertex};
use super::{cusp_map, CellError};
use crate::arith::{cusp_class, IdealClass, KElem, Ring};
use crate::geometry::UhsPoint;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct OrbitData {
    /// Sorted vertex set of the orbit representative.
    pub key: Vec<Vertex>,
    /// Maps the cell onto the representative.
    pub gamma: GroupElement,
    /// Stabilizer of the representative; `None` at singular cusps.
    pub stab: Option<Arc<Vec<GroupElement>>>,
}

pub(crate) struct OrbitEngine {
    /// canonical point -> (representative, element mapping the point to it)
    points: HashMap<UhsPoint, (UhsPoint, GroupElement)>,
    point_stabs: HashMap<UhsPoint, Arc<Vec<GroupElement>>>,
    cusps: HashMap<KElem, (KElem, GroupElement)>,
    pub cusp_classes: BTreeMap<KElem, IdealClass>,
    memo: HashMap<Vec<Vertex>, OrbitData>,
}

impl OrbitEngine {
    /// Classifies the given canonical points and cusps into orbits.
    pub fn new(ring: Ring, points: &[UhsPoint], cusps: &[KElem]) -> Result<Self, CellError> {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let mut assigned: Vec<Option<(usize, GroupElement)>> = vec![None; pts.len()];
        let mut point_stabs = HashMap::new();
        for i in 0..pts.len() {
            if assigned[i].is_some() {
                continue;
            }
            assigned[i] = Some((i, GroupElement::identity(ring)));
            let st = point_stabilizer(ring, &pts[i]);
            let order = st.len();
            if order == 0 || 24 % order != 0 {
                return Err(CellError::Consistency(format!(
                    "stabilizer of {} has order {order}",
                    pts[i]
                )));
            }
            point_stabs.insert(pts[i].clone(), Arc::new(st));
            let found: Vec<(usize, GroupElement)> = (i + 1..pts.len())
                .into_par_iter()
                .filter(|&j| assigned[j].is_none())
                .filter_map(|j| {
                    identification_matrices(ring, &pts[j], &pts[i])
                        .into_iter()
                        .next()
                        .map(|g| (j, g))
                })
                .collect();
            for (j, g) in found {
                assigned[j] = Some((i, g));
            }
        }
        let points = pts
            .iter()
            .zip(assigned)
            .map(|(p, a)| {
                let (i, g) = a.expect("assigned");
                (p.clone(), (pts[i].clone(), g))
            })
            .collect();

        let mut cs = cusps.to_vec();
        cs.sort();
        cs.dedup();
        let mut cusp_classes = BTreeMap::new();
        let mut class_rep: BTreeMap<IdealClass, KElem> = BTreeMap::new();
        let mut cusp_map_out = HashMap::new();
        for c in cs {
            let cl = cusp_class(&c);
            cusp_classes.insert(c.clone(), cl);
            let rep = class_rep.entry(cl).or_insert_with(|| c.clone()).clone();
            let g = cusp_map(&c, &rep)
                .ok_or_else(|| CellError::Consistency(format!("no map from cusp {c} to {rep}")))?;
            cusp_map_out.insert(c, (rep, g));
        }
        Ok(OrbitEngine {
            points,
            point_stabs,
            cusps: cusp_map_out,
            cusp_classes,
            memo: HashMap::new(),
        })
    }

    /// Representative, identification and stabilizer of a single vertex.
    fn vertex_data(
        &mut self,
        v: &Vertex,
    ) -> Result<(Vertex, GroupElement, Option<Arc<Vec<GroupElement>>>), CellError> {
        if let Vertex::Bary(vs) = v {
            let d = self.orbit(vs)?;
            return Ok((Vertex::Bary(d.key.clone()), d.gamma.clone(), d.stab.clone()));
        }
        let (c, t) = canonical_position(std::slice::from_ref(v));
        let tr = GroupElement::translation(&t);
        match &c[0] {
            Vertex::Point(p) => {
                let (rep, g) = self
                    .points
                    .get(p)
                    .ok_or_else(|| CellError::Consistency(format!("unclassified vertex {p}")))?;
                let st = self.point_stabs[rep].clone();
                Ok((Vertex::Point(rep.clone()), g * &tr, Some(st)))
            }
            Vertex::Cusp(z) => {
                let (rep, g) = self
                    .cusps
                    .get(z)
                    .ok_or_else(|| CellError::Consistency(format!("unclassified cusp {z}")))?;
                Ok((Vertex::Cusp(rep.clone()), g * &tr, None))
            }
            Vertex::Bary(_) => unreachable!(),
        }
    }

    /// Orbit data of the cell with vertex set `vs` (any position, any order).
    pub fn orbit(&mut self, vs: &[Vertex]) -> Result<OrbitData, CellError> {
        let (c, t) = canonical_position(vs);
        let key = cell_key(&c);
        let tr = GroupElement::translation(&t);
        if let Some(d) = self.memo.get(&key) {
            return Ok(OrbitData {
                key: d.key.clone(),
                gamma: &d.gamma * &tr,
                stab: d.stab.clone(),
            });
        }
        let data = if key.len() == 1 {
            let (rep, g, stab) = self.vertex_data(&key[0])?;
            OrbitData {
                key: vec![rep],
                gamma: g,
                stab,
            }
        } else {
            self.orbit_of_canonical(&key)?
        };
        self.memo.insert(key, data.clone());
        Ok(OrbitData {
            key: data.key,
            gamma: &data.gamma * &tr,
            stab: data.stab,
        })
    }

    fn orbit_of_canonical(&mut self, key: &[Vertex]) -> Result<OrbitData, CellError> {
        let mut anchors = Vec::new();
        for a in key.iter().filter(|a| !a.is_cusp()) {
            let (_, g, st) = self.vertex_data(a)?;
            let st = st.ok_or_else(|| {
                CellError::Consistency(format!("vertex {a} has infinite stabilizer"))
            })?;
            anchors.push((g, st));
        }
        if anchors.is_empty() {
            return Err(CellError::Consistency(format!(
                "cell {key:?} has only cusp vertices"
            )));
        }
        let jobs: Vec<GroupElement> = anchors
            .iter()
            .flat_map(|(g, st)| st.iter().map(move |s| s * g))
            .collect();
        let images: Vec<(Vec<Vertex>, GroupElement)> = jobs
            .par_iter()
            .map(|h| {
                let img: Vec<Vertex> = key.iter().map(|v| v.act(h)).collect();
                let (ci, ti) = canonical_position(&img);
                (cell_key(&ci), &GroupElement::translation(&ti) * h)
            })
            .collect();
        let best = images
            .iter()
            .map(|(k, _)| k)
            .min()
            .expect("at least one image")
            .clone();
        let mut elems: Vec<GroupElement> = images
            .into_iter()
            .filter(|(k, _)| *k == best)
            .map(|(_, e)| e)
            .collect();
        let gamma = elems[0].clone();
        let ginv = gamma.inverse();
        let mut stab: Vec<GroupElement> = elems.drain(..).map(|e| &e * &ginv).collect();
        stab.sort();
        stab.dedup();
        let order = stab.len();
        if 24 % order != 0 {
            return Err(CellError::Consistency(format!(
                "cell stabilizer of order {order}"
            )));
        }
        Ok(OrbitData {
            key: best,
            gamma,
            stab: Some(Arc::new(stab)),
        })
    }
}
