//! The Flöge cell complex: cells of the boundary of the fundamental polyhedron,
//! singular cusps, their orbits, stabilizers and identifications.
//!
//! Cells are handled modulo the translations by `O`: a 2-cell is the oriented
//! vertex cycle of one polygon, edges and vertices are derived from the cycles.
//! Orbits under the full group are classified by [`orbits::OrbitEngine`].

mod cusps;
mod group;
mod identify;
mod orbits;
mod planar;
mod vertex;

pub use cusps::{complement, cusp_map, cusp_stabilizer_generators, principal_generator};
pub use group::GroupElement;
pub use identify::{elements_up_to_norm, identification_matrices, point_stabilizer};
pub use planar::{
    chart_area2, is_convex_ccw, planar_cell_structure, rectangle_area, PlanarPolygon,
    PlanarStructure,
};
pub use vertex::{balanced_point, canonical_position, cell_key, orientation_sign, Vertex};

use crate::arith::{IdealClass, KElem, Rational, Ring};
use crate::geometry::{reduce_to_rectangle, UhsPoint};
use crate::swan::Polyhedron;
use num_traits::Zero;
use orbits::OrbitEngine;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("subdivision did not make all stabilizers act trivially after {0} rounds")]
    SubdivisionCap(usize),
}

const MAX_ROUNDS: usize = 8;

/// `sign * element . (representative of face)` is a term of the boundary of a representative.
#[derive(Clone, Debug)]
pub struct BoundaryTerm {
    pub face: usize,
    pub sign: i32,
    pub element: GroupElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspOrbit {
    #[serde(serialize_with = "crate::report::ser_kelem")]
    pub point: KElem,
    pub class: IdealClass,
    /// Unipotent generators of the stabilizer modulo `+-I`.
    pub generators: [GroupElement; 2],
}

/// One orbit of cells, described by an oriented representative.
#[derive(Clone, Debug)]
pub struct OrbitCell {
    pub dim: usize,
    /// Vertices of the representative: ordered for edges, cyclic for 2-cells.
    pub vertices: Vec<Vertex>,
    /// Full stabilizer including `+-I`; `None` at a singular cusp.
    pub stabilizer: Option<Vec<GroupElement>>,
    pub cusp: Option<CuspOrbit>,
    pub boundary: Vec<BoundaryTerm>,
    /// Number of cells modulo translations in this orbit.
    pub members: usize,
}

impl OrbitCell {
    pub fn stabilizer_order(&self) -> Option<usize> {
        self.stabilizer.as_ref().map(|s| s.len())
    }
}

/// A cell modulo translations, with its orbit and faces.
#[derive(Clone, Debug)]
pub struct MemberCell {
    pub orbit: usize,
    /// Orientation of the cell relative to its orbit representative.
    pub orientation: i32,
    /// Faces as (face orbit, incidence relative to the face representative).
    pub faces: Vec<(usize, i32)>,
}

#[derive(Clone, Debug)]
pub struct FloegeComplex {
    pub ring: Ring,
    pub class_number: usize,
    /// Orbit representatives by dimension.
    pub cells: [Vec<OrbitCell>; 3],
    /// Oriented 2-cells modulo translations after subdivision.
    pub cycles: Vec<Vec<Vertex>>,
    /// All cells modulo translations, by dimension.
    pub members: [Vec<MemberCell>; 3],
    pub planar: PlanarStructure,
    pub subdivision_rounds: usize,
}

/// Cells modulo translations, derived from oriented 2-cell cycles.
struct Level {
    /// Actual positions: vertices as singletons, edges as ordered pairs, 2-cells as cycles.
    cells: [Vec<Vec<Vertex>>; 3],
    /// Faces of each cell: (index, actual position, incidence).
    faces: [Vec<Vec<(usize, Vec<Vertex>, i32)>>; 3],
}

fn canonical_key(vs: &[Vertex]) -> Vec<Vertex> {
    cell_key(&canonical_position(vs).0)
}

impl Level {
    fn new(cycles: &[Vec<Vertex>]) -> Level {
        let mut cells: [Vec<Vec<Vertex>>; 3] = Default::default();
        let mut faces: [Vec<Vec<(usize, Vec<Vertex>, i32)>>; 3] = Default::default();
        let mut keys: [HashMap<Vec<Vertex>, usize>; 2] = Default::default();
        let mut index_of =
            |d: usize,
             vs: Vec<Vertex>,
             cells: &mut [Vec<Vec<Vertex>>; 3],
             faces: &mut [Vec<Vec<(usize, Vec<Vertex>, i32)>>; 3]| {
                let key = canonical_key(&vs);
                *keys[d].entry(key).or_insert_with(|| {
                    cells[d].push(vs);
                    faces[d].push(Vec::new());
                    cells[d].len() - 1
                })
            };
        for cyc in cycles {
            let n = cyc.len();
            let mut fs = Vec::with_capacity(n);
            for i in 0..n {
                let e = vec![cyc[i].clone(), cyc[(i + 1) % n].clone()];
                let j = index_of(1, e.clone(), &mut cells, &mut faces);
                fs.push((j, e, 1));
            }
            cells[2].push(cyc.clone());
            faces[2].push(fs);
        }
        for j in 0..cells[1].len() {
            let e = cells[1][j].clone();
            let mut fs = Vec::new();
            for (k, sign) in [(1, 1), (0, -1)] {
                let v = vec![e[k].clone()];
                let i = index_of(0, v.clone(), &mut cells, &mut faces);
                fs.push((i, v, sign));
            }
            faces[1][j] = fs;
        }
        Level { cells, faces }
    }
}

/// Orbit of each cell of one dimension: (orbit index, element to the representative).
struct Classified {
    orbit_of: Vec<(usize, GroupElement)>,
    reps: Vec<(Vec<Vertex>, Option<Vec<GroupElement>>, usize)>,
    keys: Vec<Vec<Vertex>>,
}

fn classify(engine: &mut OrbitEngine, cells: &[Vec<Vertex>]) -> Result<Classified, CellError> {
    let mut index: HashMap<Vec<Vertex>, usize> = HashMap::new();
    let mut orbit_of = Vec::with_capacity(cells.len());
    let mut reps: Vec<(Vec<Vertex>, Option<Vec<GroupElement>>, usize)> = Vec::new();
    let mut keys = Vec::new();
    for c in cells {
        let d = engine.orbit(c)?;
        let next = reps.len();
        let k = *index.entry(d.key.clone()).or_insert(next);
        if k == next {
            let oriented: Vec<Vertex> = c.iter().map(|v| v.act(&d.gamma)).collect();
            reps.push((oriented, d.stab.as_ref().map(|s| s.to_vec()), 0));
            keys.push(d.key.clone());
        }
        reps[k].2 += 1;
        orbit_of.push((k, d.gamma));
    }
    Ok(Classified {
        orbit_of,
        reps,
        keys,
    })
}

fn fixes_pointwise(stab: &Option<Vec<GroupElement>>, vs: &[Vertex]) -> bool {
    match stab {
        None => true,
        Some(st) => st.iter().all(|s| vs.iter().all(|v| v.act(s) == *v)),
    }
}

/// Polygon cycles, with the balanced point inserted into every edge joining two cusps.
fn initial_cycles(planar: &PlanarStructure) -> Vec<Vec<Vertex>> {
    planar
        .polygons
        .iter()
        .map(|p| {
            let n = p.vertices.len();
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                out.push(p.vertices[i].clone());
                if let (Vertex::Cusp(a), Vertex::Cusp(b)) =
                    (&p.vertices[i], &p.vertices[(i + 1) % n])
                {
                    out.push(Vertex::Point(balanced_point(a, b)));
                }
            }
            out
        })
        .collect()
}

fn leaves(v: &Vertex, pts: &mut Vec<UhsPoint>, cusps: &mut Vec<KElem>) {
    match v {
        Vertex::Point(p) => {
            let (z, _) = reduce_to_rectangle(&p.z);
            pts.push(UhsPoint::new(z, p.h2.clone()));
        }
        Vertex::Cusp(z) => cusps.push(reduce_to_rectangle(z).0),
        Vertex::Bary(vs) => vs.iter().for_each(|w| leaves(w, pts, cusps)),
    }
}

/// Builds the orbit complex of the boundary of the polyhedron, subdividing
/// until every stabilizer fixes its cell pointwise.
pub fn build_complex(poly: &Polyhedron) -> Result<FloegeComplex, CellError> {
    let ring = poly.ctx.ring;
    let planar = planar_cell_structure(poly)?;
    let mut cycles = initial_cycles(&planar);
    let (mut pts, mut cusps) = (Vec::new(), Vec::new());
    for c in &cycles {
        c.iter().for_each(|v| leaves(v, &mut pts, &mut cusps));
    }
    cusps.extend(
        poly.singular
            .iter()
            .map(|s| reduce_to_rectangle(&s.value).0),
    );
    let mut engine = OrbitEngine::new(ring, &pts, &cusps)?;

    for round in 0..MAX_ROUNDS {
        let level = Level::new(&cycles);
        let edges = classify(&mut engine, &level.cells[1])?;
        let flipped: HashSet<Vec<Vertex>> = edges
            .reps
            .iter()
            .zip(&edges.keys)
            .filter(|((vs, st, _), _)| !fixes_pointwise(st, vs))
            .map(|(_, k)| k.clone())
            .collect();
        if !flipped.is_empty() {
            cycles = split_edges(&mut engine, &cycles, &flipped)?;
            continue;
        }
        let faces = classify(&mut engine, &level.cells[2])?;
        let rotated: HashSet<usize> = (0..faces.reps.len())
            .filter(|&k| !fixes_pointwise(&faces.reps[k].1, &faces.reps[k].0))
            .collect();
        if !rotated.is_empty() {
            cycles = cone_cells(&cycles, &faces, &rotated);
            continue;
        }
        let verts = classify(&mut engine, &level.cells[0])?;
        let classes = [verts, edges, faces];
        let members = member_cells(&mut engine, &level, &classes)?;
        let cells = assemble(&mut engine, &level, classes)?;
        let complex = FloegeComplex {
            ring,
            class_number: poly.ctx.class_number,
            cells,
            cycles,
            members,
            planar,
            subdivision_rounds: round,
        };
        complex.check_boundary_squared()?;
        return Ok(complex);
    }
    Err(CellError::SubdivisionCap(MAX_ROUNDS))
}

fn split_edges(
    engine: &mut OrbitEngine,
    cycles: &[Vec<Vertex>],
    flipped: &HashSet<Vec<Vertex>>,
) -> Result<Vec<Vec<Vertex>>, CellError> {
    let mut out = Vec::with_capacity(cycles.len());
    for cyc in cycles {
        let n = cyc.len();
        let mut next = Vec::with_capacity(2 * n);
        for i in 0..n {
            let e = [cyc[i].clone(), cyc[(i + 1) % n].clone()];
            next.push(e[0].clone());
            if flipped.contains(&engine.orbit(&e)?.key) {
                next.push(Vertex::bary(e.to_vec()));
            }
        }
        out.push(next);
    }
    Ok(out)
}

fn cone_cells(
    cycles: &[Vec<Vertex>],
    faces: &Classified,
    rotated: &HashSet<usize>,
) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for (cyc, (k, _)) in cycles.iter().zip(&faces.orbit_of) {
        if !rotated.contains(k) {
            out.push(cyc.clone());
            continue;
        }
        let b = Vertex::bary(cyc.clone());
        let n = cyc.len();
        for i in 0..n {
            out.push(vec![b.clone(), cyc[i].clone(), cyc[(i + 1) % n].clone()]);
        }
    }
    out
}

fn member_cells(
    engine: &mut OrbitEngine,
    level: &Level,
    classes: &[Classified; 3],
) -> Result<[Vec<MemberCell>; 3], CellError> {
    let mut out: [Vec<MemberCell>; 3] = Default::default();
    for d in 0..3 {
        for (i, c) in level.cells[d].iter().enumerate() {
            let (orbit, gamma) = &classes[d].orbit_of[i];
            let moved: Vec<Vertex> = c.iter().map(|v| v.act(gamma)).collect();
            let orientation =
                orientation_sign(&moved, &classes[d].reps[*orbit].0).ok_or_else(|| {
                    CellError::Consistency(format!(
                        "cell {c:?} is not an oriented image of its representative"
                    ))
                })?;
            let mut faces = Vec::new();
            for (j, fpos, inc) in &level.faces[d][i] {
                let fd = engine.orbit(fpos)?;
                let face = classes[d - 1].orbit_of[*j].0;
                let moved: Vec<Vertex> = fpos.iter().map(|v| v.act(&fd.gamma)).collect();
                let eps =
                    orientation_sign(&moved, &classes[d - 1].reps[face].0).ok_or_else(|| {
                        CellError::Consistency(format!(
                            "face {moved:?} does not match its representative"
                        ))
                    })?;
                faces.push((face, inc * eps));
            }
            out[d].push(MemberCell {
                orbit: *orbit,
                orientation,
                faces,
            });
        }
    }
    Ok(out)
}

fn assemble(
    engine: &mut OrbitEngine,
    level: &Level,
    classes: [Classified; 3],
) -> Result<[Vec<OrbitCell>; 3], CellError> {
    let mut out: [Vec<OrbitCell>; 3] = Default::default();
    for d in 0..3 {
        let cl = &classes[d];
        // first cell of each orbit
        let mut first = vec![usize::MAX; cl.reps.len()];
        for (i, (k, _)) in cl.orbit_of.iter().enumerate() {
            if first[*k] == usize::MAX {
                first[*k] = i;
            }
        }
        for (k, (rep, stab, members)) in cl.reps.iter().enumerate() {
            let c0 = first[k];
            let gamma0 = &cl.orbit_of[c0].1;
            let mut boundary = Vec::new();
            if d > 0 {
                let below = &classes[d - 1];
                for (fi, fpos, inc) in &level.faces[d][c0] {
                    let fd = engine.orbit(fpos)?;
                    let (face, _) = below.orbit_of[*fi];
                    let moved: Vec<Vertex> = fpos.iter().map(|v| v.act(&fd.gamma)).collect();
                    let eps = orientation_sign(&moved, &below.reps[face].0).ok_or_else(|| {
                        CellError::Consistency(format!(
                            "face {moved:?} does not match its representative"
                        ))
                    })?;
                    boundary.push(BoundaryTerm {
                        face,
                        sign: inc * eps,
                        element: gamma0 * &fd.gamma.inverse(),
                    });
                }
            }
            let cusp = match (d, &rep[0]) {
                (0, Vertex::Cusp(z)) => Some(CuspOrbit {
                    point: z.clone(),
                    class: engine
                        .cusp_classes
                        .get(z)
                        .copied()
                        .unwrap_or_else(|| crate::arith::cusp_class(z)),
                    generators: cusp_stabilizer_generators(z),
                }),
                _ => None,
            };
            out[d].push(OrbitCell {
                dim: d,
                vertices: rep.clone(),
                stabilizer: stab.clone(),
                cusp,
                boundary,
                members: *members,
            });
        }
    }
    Ok(out)
}

impl FloegeComplex {
    pub fn orbit_counts(&self) -> [usize; 3] {
        [
            self.cells[0].len(),
            self.cells[1].len(),
            self.cells[2].len(),
        ]
    }

    pub fn cusp_orbits(&self) -> Vec<&OrbitCell> {
        self.cells[0].iter().filter(|c| c.cusp.is_some()).collect()
    }

    /// `sum (-1)^dim / |stabilizer|` over orbits with finite stabilizer.
    pub fn orbifold_euler_characteristic(&self) -> Rational {
        let mut chi = Rational::zero();
        for (d, cells) in self.cells.iter().enumerate() {
            for c in cells {
                if let Some(order) = c.stabilizer_order() {
                    let term = Rational::new(1.into(), (order as i64).into());
                    if d % 2 == 0 {
                        chi += term;
                    } else {
                        chi -= term;
                    }
                }
            }
        }
        chi
    }

    /// Checks that the boundary of the boundary of every representative
    /// vanishes, evaluated on actual vertex positions.
    pub fn check_boundary_squared(&self) -> Result<(), CellError> {
        for d in [1usize, 2] {
            for (k, c) in self.cells[d].iter().enumerate() {
                let mut sum: BTreeMap<Vertex, i32> = BTreeMap::new();
                if d == 1 {
                    for t in &c.boundary {
                        let v = self.cells[0][t.face].vertices[0].act(&t.element);
                        *sum.entry(v).or_default() += t.sign;
                    }
                } else {
                    let mut edges: BTreeMap<(Vertex, Vertex), i32> = BTreeMap::new();
                    for t in &c.boundary {
                        let e = &self.cells[1][t.face];
                        for u in &e.boundary {
                            let g = &t.element * &u.element;
                            let v = self.cells[0][u.face].vertices[0].act(&g);
                            *sum.entry(v).or_default() += t.sign * u.sign;
                        }
                        let a = e.vertices[0].act(&t.element);
                        let b = e.vertices[1].act(&t.element);
                        *edges.entry((a, b)).or_default() += t.sign;
                    }
                    // the boundary edges must traverse the representative's cycle
                    let n = c.vertices.len();
                    for i in 0..n {
                        let e = (c.vertices[i].clone(), c.vertices[(i + 1) % n].clone());
                        let rev = (e.1.clone(), e.0.clone());
                        let got = edges.get(&e).copied().unwrap_or(0)
                            - edges.get(&rev).copied().unwrap_or(0);
                        if got != 1 {
                            return Err(CellError::Consistency(format!(
                                "boundary of 2-cell orbit {k} misses edge {} -> {}",
                                e.0, e.1
                            )));
                        }
                    }
                }
                if sum.values().any(|&x| x != 0) && d == 2 {
                    return Err(CellError::Consistency(format!(
                        "boundary of boundary of 2-cell orbit {k} is nonzero"
                    )));
                }
                if d == 1 {
                    let expect: BTreeMap<Vertex, i32> = if c.vertices[0] == c.vertices[1] {
                        BTreeMap::new()
                    } else {
                        [(c.vertices[1].clone(), 1), (c.vertices[0].clone(), -1)]
                            .into_iter()
                            .collect()
                    };
                    let got: BTreeMap<Vertex, i32> =
                        sum.into_iter().filter(|(_, x)| *x != 0).collect();
                    if got != expect {
                        return Err(CellError::Consistency(format!(
                            "boundary of edge orbit {k} is wrong"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Integer incidence matrix `[row = d-cell orbit][col = (d-1)-cell orbit]`
    /// of the quotient complex, read off the cells modulo translations. Every
    /// member of an orbit must give the same row.
    pub fn quotient_incidence(&self, d: usize) -> Result<Vec<Vec<i64>>, CellError> {
        let cols = self.cells[d - 1].len();
        let mut rows: Vec<Option<Vec<i64>>> = vec![None; self.cells[d].len()];
        for c in &self.members[d] {
            let mut row = vec![0i64; cols];
            for &(face, inc) in &c.faces {
                row[face] += (c.orientation * inc) as i64;
            }
            match &rows[c.orbit] {
                None => rows[c.orbit] = Some(row),
                Some(r) if *r == row => {}
                Some(_) => {
                    return Err(CellError::Consistency(format!(
                        "members of {d}-cell orbit {} disagree on the quotient boundary",
                        c.orbit
                    )))
                }
            }
        }
        Ok(rows
            .into_iter()
            .map(|r| r.expect("every orbit has a member"))
            .collect())
    }

    /// Floating point OFF mesh of the boundary polygons over `D0`, 12 significant
    /// digits; not certified.
    pub fn off_mesh(&self) -> String {
        let mut verts: Vec<(f64, f64, f64)> = Vec::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for p in &self.planar.polygons {
            let mut f = Vec::new();
            for v in &p.vertices {
                f.push(verts.len());
                verts.push(v.to_f64());
            }
            faces.push(f);
        }
        let mut s = String::new();
        let _ = writeln!(s, "OFF\n# floating point rendering, not certified");
        let _ = writeln!(s, "{} {} 0", verts.len(), faces.len());
        for (x, y, z) in &verts {
            let _ = writeln!(s, "{x:.11e} {y:.11e} {z:.11e}");
        }
        for f in &faces {
            let _ = write!(s, "{}", f.len());
            for i in f {
                let _ = write!(s, " {i}");
            }
            let _ = writeln!(s);
        }
        s
    }
}
