//! The row `q = 0` of the equivariant spectral sequence and the cusp blocks.
//!
//! `E_1^{p,0} = ⊕_σ M^{Γ_σ}` over orbits of `p`-cells. An equivariant cochain
//! is determined by its values on representatives, and with
//! `∂τ = Σ sign · g σ` the differential is `(δφ)(τ) = Σ sign · ρ(g) φ(σ)`.

use crate::cellcomplex::{FloegeComplex, GroupElement};
use crate::coefficients::linalg::{self, Matrix};
use crate::coefficients::{
    action_matrix, fixed_space, invariants, torus_cohomology, Field, ModuleError, Weight,
};
use std::collections::HashMap;

/// Invariants of one orbit: columns spanning `M^{Γ_σ}`.
#[derive(Clone, Debug)]
pub struct Block<E> {
    pub basis: Matrix<E>,
    /// `(H^0, H^1, H^2)` at a singular cusp.
    pub torus: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct EquivariantComplex<F: Field> {
    pub field: F,
    pub weight: Weight,
    pub blocks: [Vec<Block<F::E>>; 3],
    /// `d[p]` maps `E_1^{p,0}` (invariant coordinates) to the ambient
    /// `⊕ M` over `(p+1)`-cell orbits.
    pub d: [Matrix<F::E>; 2],
    /// `d1` on ambient coordinates, for composing with `d0`.
    pub d1_ambient: Matrix<F::E>,
}

/// `Σ sign ρ(g)` for each (target, source) pair of orbits.
pub fn boundary_sums<F: Field>(
    f: &F,
    complex: &FloegeComplex,
    dim: usize,
    w: Weight,
    cache: &mut HashMap<GroupElement, Matrix<F::E>>,
) -> Vec<Vec<Option<Matrix<F::E>>>> {
    let targets = &complex.cells[dim];
    let sources = complex.cells[dim - 1].len();
    let mut out = vec![vec![None; sources]; targets.len()];
    for (t, cell) in targets.iter().enumerate() {
        for term in &cell.boundary {
            let rho = cache
                .entry(term.element.clone())
                .or_insert_with(|| action_matrix(f, &term.element, w));
            let signed = if term.sign > 0 {
                rho.clone()
            } else {
                linalg::scale(f, &f.neg(&f.one()), rho)
            };
            let slot = &mut out[t][term.face];
            *slot = Some(match slot.take() {
                None => signed,
                Some(acc) => linalg::add(f, &acc, &signed),
            });
        }
    }
    out
}

pub(super) fn assemble<F: Field>(
    f: &F,
    sums: &[Vec<Option<Matrix<F::E>>>],
    sources: &[Block<F::E>],
    w: Weight,
) -> Matrix<F::E> {
    let dim = w.dim();
    let cols: usize = sources.iter().map(|b| b.basis.cols).sum();
    let mut out = linalg::zeros(f, dim * sums.len(), cols);
    for (t, row) in sums.iter().enumerate() {
        let mut c0 = 0;
        for (s, block) in sources.iter().enumerate() {
            if let Some(m) = &row[s] {
                let prod = linalg::mul(f, m, &block.basis);
                for i in 0..dim {
                    for j in 0..block.basis.cols {
                        out.set(t * dim + i, c0 + j, prod.get(i, j).clone());
                    }
                }
            }
            c0 += block.basis.cols;
        }
    }
    out
}

impl<F: Field> EquivariantComplex<F> {
    pub fn build(
        f: &F,
        complex: &FloegeComplex,
        w: impl Into<Weight>,
    ) -> Result<Self, ModuleError> {
        let w = w.into();
        let mut blocks: [Vec<Block<F::E>>; 3] = Default::default();
        for (d, cells) in complex.cells.iter().enumerate() {
            for cell in cells {
                let block = match (&cell.stabilizer, &cell.cusp) {
                    (Some(st), _) => Block {
                        basis: invariants(f, st, w)?.basis,
                        torus: None,
                    },
                    (None, Some(c)) => Block {
                        basis: fixed_space(f, &c.generators, w),
                        torus: Some(torus_cohomology(f, &c.generators[0], &c.generators[1], w)?),
                    },
                    (None, None) => unreachable!("orbit without stabilizer data"),
                };
                blocks[d].push(block);
            }
        }
        let mut cache = HashMap::new();
        let s1 = boundary_sums(f, complex, 1, w, &mut cache);
        let s2 = boundary_sums(f, complex, 2, w, &mut cache);
        let d0 = assemble(f, &s1, &blocks[0], w);
        let d1 = assemble(f, &s2, &blocks[1], w);
        let identity_blocks: Vec<Block<F::E>> = (0..complex.cells[1].len())
            .map(|_| Block {
                basis: linalg::identity(f, w.dim()),
                torus: None,
            })
            .collect();
        let d1_ambient = assemble(f, &s2, &identity_blocks, w);
        Ok(EquivariantComplex {
            field: f.clone(),
            weight: w,
            blocks,
            d: [d0, d1],
            d1_ambient,
        })
    }

    /// `dim E_1^{p,0}`.
    pub fn e1(&self, p: usize) -> usize {
        self.blocks[p].iter().map(|b| b.basis.cols).sum()
    }

    pub fn ranks(&self) -> [usize; 2] {
        [
            linalg::rank(&self.field, &self.d[0]),
            linalg::rank(&self.field, &self.d[1]),
        ]
    }

    /// `d1 ∘ d0 = 0`.
    pub fn composition_vanishes(&self) -> bool {
        let prod = linalg::mul(&self.field, &self.d1_ambient, &self.d[0]);
        linalg::is_zero(&self.field, &prod)
    }

    pub fn torus_blocks(&self) -> Vec<(usize, usize, usize)> {
        self.blocks[0].iter().filter_map(|b| b.torus).collect()
    }
}
