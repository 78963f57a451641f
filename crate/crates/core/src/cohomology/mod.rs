//! `dim H^2(Γ, E_{n,n})` from the equivariant spectral sequence of the cell complex.
//!
//! Finite stabilizers have no higher cohomology in characteristic 0 or `p > 3`,
//! so only singular cusps contribute rows `q = 1, 2`, with `H^q(Γ_s, M)` of
//! dimensions `(1, 2, 1)`. Hence
//! `dim H^2 = Σ_s dim H^2(Γ_s) + dim E_2^{2,0} - rank d_2^{0,1}`, and `d_2` is
//! only bounded: `0 <= rank d_2 <= min(Σ_s dim H^1(Γ_s), dim E_2^{2,0})`.

mod complex;
mod krank;
mod sweep;

pub use complex::{boundary_sums, Block, EquivariantComplex};
pub use krank::{k_rational_rank, CertifiedRank, KRanks};
pub use sweep::{
    k_report, modp_report, modp_sweep, Certification, LiftBounds, LiftEntry, LiftTable, SweepResult,
};

use crate::cellcomplex::FloegeComplex;
use crate::coefficients::linalg::{self, Matrix};
use crate::coefficients::{Field, FieldKind, ModuleError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("d1 ∘ d0 is nonzero over {0}")]
    NotAComplex(FieldKind),
    #[error("negative cuspidal dimension {0} over {1}")]
    NegativeCuspidal(i64, FieldKind),
    #[error("mod-p dimension {modp} is below the K-rational dimension {k} at p = {p}")]
    UniversalCoefficients { p: u64, modp: usize, k: usize },
    #[error("p = {0} is not a good prime: {1}")]
    BadPrime(u64, crate::coefficients::FieldError),
    #[error("no good primes up to {0}")]
    NoPrimes(u64),
    #[error("exact reconstruction over K did not converge")]
    Reconstruction,
    #[error(transparent)]
    Cell(#[from] crate::cellcomplex::CellError),
}

/// `h - δ(n, 0)`.
pub fn eisenstein_dimension(class_number: usize, n: usize) -> usize {
    if n == 0 {
        class_number - 1
    } else {
        class_number
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimensionReport {
    pub m: i64,
    pub n: usize,
    pub field: FieldKind,
    pub class_number: usize,
    /// Orbit counts of vertices, edges and 2-cells.
    pub orbits: [usize; 3],
    pub e1: [usize; 3],
    pub rank_d0: usize,
    pub rank_d1: usize,
    pub e2: [usize; 3],
    /// `(H^0, H^1, H^2)` of each singular cusp stabilizer.
    pub cusps: Vec<(usize, usize, usize)>,
    pub h2_lower: usize,
    pub h2_upper: usize,
    pub eisenstein: usize,
    pub cuspidal_lower: usize,
    pub cuspidal_upper: usize,
    /// Upper bound when every singular cusp contributes a nonzero `d_2`.
    pub conjecture_cuspidal_upper: usize,
    /// Whether the ranks are proven (always for finite fields).
    pub certified: bool,
}

impl DimensionReport {
    pub fn h2_exact(&self) -> Option<usize> {
        (self.h2_lower == self.h2_upper).then_some(self.h2_lower)
    }

    pub fn cuspidal_exact(&self) -> Option<usize> {
        (self.cuspidal_lower == self.cuspidal_upper).then_some(self.cuspidal_lower)
    }
}

/// Assembles the report from `E_1` dimensions and ranks.
pub fn report_from_ranks(
    complex: &FloegeComplex,
    n: usize,
    field: FieldKind,
    e1: [usize; 3],
    ranks: [usize; 2],
    cusps: Vec<(usize, usize, usize)>,
    certified: bool,
) -> Result<DimensionReport, CohomologyError> {
    let [r0, r1] = ranks;
    let e2 = [e1[0] - r0, e1[1] - r0 - r1, e1[2] - r1];
    let h2_cusps: usize = cusps.iter().map(|c| c.2).sum();
    let h1_cusps: usize = cusps.iter().map(|c| c.1).sum();
    let h2_upper = h2_cusps + e2[2];
    let h2_lower = h2_upper - h1_cusps.min(e2[2]);
    let h = complex.class_number;
    let eis = eisenstein_dimension(h, n);
    let cusp_low = h2_lower as i64 - eis as i64;
    if cusp_low < 0 && h2_upper < eis {
        return Err(CohomologyError::NegativeCuspidal(
            h2_upper as i64 - eis as i64,
            field,
        ));
    }
    let cuspidal_lower = cusp_low.max(0) as usize;
    let cuspidal_upper = h2_upper - eis;
    let conjecture = (h2_upper - cusps.len().min(e2[2])).max(h2_lower) - eis;
    Ok(DimensionReport {
        m: complex.ring.m(),
        n,
        field,
        class_number: h,
        orbits: complex.orbit_counts(),
        e1,
        rank_d0: r0,
        rank_d1: r1,
        e2,
        cusps,
        h2_lower,
        h2_upper,
        eisenstein: eis,
        cuspidal_lower,
        cuspidal_upper,
        conjecture_cuspidal_upper: conjecture,
        certified,
    })
}

/// The report over a field, by direct elimination.
pub fn h2_dimension<F: Field>(
    f: &F,
    complex: &FloegeComplex,
    n: usize,
) -> Result<DimensionReport, CohomologyError> {
    let c = EquivariantComplex::build(f, complex, n)?;
    if !c.composition_vanishes() {
        return Err(CohomologyError::NotAComplex(f.kind()));
    }
    let e1 = [c.e1(0), c.e1(1), c.e1(2)];
    report_from_ranks(complex, n, f.kind(), e1, c.ranks(), c.torus_blocks(), true)
}

/// Cellular cohomology `H^p(X/Γ; F)` of the quotient, from the integer
/// incidence matrices of the orbit cells.
pub fn quotient_cohomology<F: Field>(
    f: &F,
    complex: &FloegeComplex,
) -> Result<[usize; 3], CohomologyError> {
    let to_matrix = |rows: Vec<Vec<i64>>, cols: usize| -> Matrix<F::E> {
        let mut m = linalg::zeros(f, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, f.from_int(*x));
            }
        }
        m
    };
    let c = complex.orbit_counts();
    let b1 = to_matrix(complex.quotient_incidence(1)?, c[0]);
    let b2 = to_matrix(complex.quotient_incidence(2)?, c[1]);
    if !linalg::is_zero(f, &linalg::mul(f, &b2, &b1)) {
        return Err(CohomologyError::NotAComplex(f.kind()));
    }
    let (r1, r2) = (linalg::rank(f, &b1), linalg::rank(f, &b2));
    Ok([c[0] - r1, c[1] - r1 - r2, c[2] - r2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field_context;
    use crate::cellcomplex::build_complex;
    use crate::coefficients::{Fp, KField};
    use crate::swan::compute_polyhedron;

    fn complex(m: i64) -> FloegeComplex {
        build_complex(&compute_polyhedron(&field_context(m).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn trivial_coefficients_match_the_quotient() {
        for m in [2, 5, 7] {
            let c = complex(m);
            let f = KField { ring: c.ring };
            let r = h2_dimension(&f, &c, 0).unwrap();
            assert_eq!(r.e2, quotient_cohomology(&f, &c).unwrap(), "m={m}");
            assert_eq!(r.e2[0], 1);
        }
    }

    #[test]
    fn small_weights_agree_over_k_and_fp() {
        let c = complex(2);
        let k = KField { ring: c.ring };
        let fp = Fp::new(c.ring, 11, false).unwrap();
        for n in 0..3 {
            let a = h2_dimension(&k, &c, n).unwrap();
            let b = h2_dimension(&fp, &c, n).unwrap();
            assert_eq!((a.e1, a.e2), (b.e1, b.e2), "n={n}");
        }
    }
}
