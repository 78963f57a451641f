//! Certified ranks of the differentials over `K`.
//!
//! All matrices are built from integral data: invariants of a finite
//! stabilizer are spanned by columns of its group sum, chosen modulo a
//! reference prime. Reducing modulo a prime of degree one can only lower a
//! rank, which gives the lower bounds. Upper bounds come from kernel vectors
//! over `K`: reduced-echelon kernel vectors are computed modulo both primes
//! above several split `p`, lifted by CRT and rational reconstruction, and
//! then checked exactly.
//!
//! For `d_1` only a complement of `im d_0` inside `ker d_1` is reconstructed;
//! `d_1 d_0 = 0` holds for every weight once `∂∂ = 0` has been checked on the
//! cells.

use super::complex::{assemble, boundary_sums, Block};
use super::CohomologyError;
use crate::arith::{KElem, Rational, Ring};
use crate::cellcomplex::{FloegeComplex, GroupElement};
use crate::coefficients::linalg::{self, Matrix};
use crate::coefficients::{
    action_matrix, close_group, group_sum, is_prime, pow_mod, splitting, substitution_matrix,
    Field, Fp, KField, Splitting, Weight,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Primes (pairs of degree-one primes of `O`) tried before giving up on an upper bound.
const MAX_PRIMES: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedRank {
    pub lower: usize,
    pub upper: usize,
}

impl CertifiedRank {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KRanks {
    pub e1: [usize; 3],
    pub d0: CertifiedRank,
    pub d1: CertifiedRank,
    /// `(H^0, H^1, H^2)` over `K` at each singular cusp.
    pub cusps: Vec<(usize, usize, usize)>,
    /// Number of primes used for reconstruction.
    pub primes_used: usize,
}

/// Split primes below `2^31`, descending.
fn split_primes(ring: Ring) -> impl Iterator<Item = u64> {
    (1u64 << 24..1u64 << 31)
        .rev()
        .filter(move |&p| p % 2 == 1 && is_prime(p) && splitting(ring, p) == Splitting::Split)
}

fn rat_mod(q: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = q.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let n = q.numer().mod_floor(&pb);
    let d: u64 = d.try_into().ok()?;
    let n: u64 = n.try_into().ok()?;
    let di = pow_mod(d, p - 2, p);
    Some(n * di % p)
}

/// Image of a `p`-integral element of `K` in `O / P`.
fn embed_k(f: &Fp, x: &KElem) -> Option<u64> {
    let r = rat_mod(&x.r(), f.p)?;
    let w = rat_mod(&x.w(), f.p)?;
    Some((r + w * f.t) % f.p)
}

/// `n / d` with `|n|, d <= sqrt(M / 2)` congruent to `a` modulo `M`.
fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Coordinates `(r, w)` of vectors over `K`, accumulated modulo a growing product of primes.
struct Lifter {
    ring: Ring,
    modulus: BigInt,
    coords: Vec<Vec<(BigInt, BigInt)>>,
    last: Option<Vec<Vec<KElem>>>,
}

impl Lifter {
    fn new(ring: Ring) -> Self {
        Lifter {
            ring,
            modulus: BigInt::one(),
            coords: Vec::new(),
            last: None,
        }
    }

    /// Adds the images `v1` (at `omega -> t1`) and `v2` (at `omega -> t2`).
    fn add(&mut self, p: u64, t1: u64, t2: u64, v1: &[Vec<u64>], v2: &[Vec<u64>]) {
        let inv = pow_mod((t1 + p - t2) % p, p - 2, p);
        let pb = BigInt::from(p);
        let first = self.coords.is_empty();
        if first {
            self.coords = v1
                .iter()
                .map(|v| vec![(BigInt::zero(), BigInt::zero()); v.len()])
                .collect();
        }
        // x = r + w t mod p; CRT with the current residues
        let m_inv = if first {
            BigInt::zero()
        } else {
            let mm: u64 = (&self.modulus % &pb).try_into().unwrap();
            BigInt::from(pow_mod(mm, p - 2, p))
        };
        for (k, (a, b)) in v1.iter().zip(v2).enumerate() {
            for (i, (&x1, &x2)) in a.iter().zip(b).enumerate() {
                let w = (x1 + p - x2) % p * inv % p;
                let r = (x1 + p - w * t1 % p) % p;
                let slot = &mut self.coords[k][i];
                for (acc, new) in [(&mut slot.0, r), (&mut slot.1, w)] {
                    if first {
                        *acc = BigInt::from(new);
                    } else {
                        let diff = (BigInt::from(new) - &*acc).mod_floor(&pb);
                        let t = (diff * &m_inv).mod_floor(&pb);
                        *acc += t * &self.modulus;
                    }
                }
            }
        }
        self.modulus *= pb;
    }

    /// Reconstructed vectors, when every coordinate reconstructs and agrees
    /// with the previous attempt.
    fn stable(&mut self) -> Option<Vec<Vec<KElem>>> {
        let mut out = Vec::with_capacity(self.coords.len());
        for v in &self.coords {
            let mut row = Vec::with_capacity(v.len());
            for (r, w) in v {
                let r = rational_reconstruction(r, &self.modulus)?;
                let w = rational_reconstruction(w, &self.modulus)?;
                row.push(KElem::from_basis(self.ring, r, w));
            }
            out.push(row);
        }
        let agree = self.last.as_ref() == Some(&out);
        self.last = Some(out.clone());
        agree.then_some(out)
    }
}

/// Canonical vectors computed modulo one prime, with a signature that must
/// agree between primes for the vectors to be compatible.
struct Canonical {
    signature: Vec<usize>,
    vectors: Vec<Vec<u64>>,
}

/// Reduced-echelon kernel vectors of `a` whose free column lies in `wanted`
/// (all free columns when `None`).
fn echelon_kernel(
    f: &Fp,
    a: &Matrix<u64>,
    wanted: Option<&[usize]>,
) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut r = a.clone();
    let pivots = linalg::rref(f, &mut r);
    let mut out = Vec::new();
    for fc in (0..a.cols).filter(|c| !pivots.contains(c)) {
        if wanted.is_some_and(|w| !w.contains(&fc)) {
            continue;
        }
        let mut v = vec![0; a.cols];
        v[fc] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(r.get(i, fc));
        }
        out.push(v);
    }
    (pivots, out)
}

/// Lifts canonical vectors to `K` and checks them with `verify`. Returns the
/// vectors and the number of primes used, or `None` within the prime budget.
/// Primes are reduced in parallel batches.
fn reconstruct(
    ring: Ring,
    canonical: impl Fn(&Fp) -> Option<Canonical> + Sync,
    verify: impl Fn(&[Vec<KElem>]) -> bool,
) -> Option<(Vec<Vec<KElem>>, usize)> {
    let mut lifter = Lifter::new(ring);
    let mut signature: Option<Vec<usize>> = None;
    let mut used = 0;
    let batch = rayon::current_num_threads().clamp(2, 8);
    let primes: Vec<u64> = split_primes(ring).take(MAX_PRIMES * 2).collect();
    for chunk in primes.chunks(batch) {
        let images: Vec<_> = chunk
            .par_iter()
            .map(|&p| {
                let (f1, f2) = (Fp::new(ring, p, false).ok()?, Fp::new(ring, p, true).ok()?);
                let (c1, c2) = (canonical(&f1)?, canonical(&f2)?);
                (c1.signature == c2.signature).then_some((p, f1.t, f2.t, c1, c2))
            })
            .collect();
        for (p, t1, t2, c1, c2) in images.into_iter().flatten() {
            match &signature {
                Some(s) if *s != c1.signature => {
                    // a larger rank (fewer vectors) wins; otherwise skip the prime
                    if c1.vectors.len() < lifter.coords.len() {
                        lifter = Lifter::new(ring);
                        signature = Some(c1.signature.clone());
                    } else {
                        continue;
                    }
                }
                None => signature = Some(c1.signature.clone()),
                _ => {}
            }
            if c1.vectors.is_empty() {
                return Some((Vec::new(), used + 1));
            }
            lifter.add(p, t1, t2, &c1.vectors, &c2.vectors);
            used += 1;
            if let Some(vs) = lifter.stable() {
                if verify(&vs) {
                    return Some((vs, used));
                }
            }
            if used >= MAX_PRIMES {
                return None;
            }
        }
    }
    None
}

/// Exact action of group elements on `E_{k,l}` over `K`, through the two
/// substitution factors.
struct ExactAction {
    w: Weight,
    cache: HashMap<GroupElement, (Matrix<KElem>, Matrix<KElem>)>,
    f: KField,
}

impl ExactAction {
    fn new(ring: Ring, w: Weight) -> Self {
        ExactAction {
            w,
            cache: HashMap::new(),
            f: KField { ring },
        }
    }

    fn factors(&mut self, g: &GroupElement) -> &(Matrix<KElem>, Matrix<KElem>) {
        let (f, w) = (&self.f, self.w);
        self.cache.entry(g.clone()).or_insert_with(|| {
            let first = substitution_matrix(f, &g.a, &g.b, &g.c, &g.d, w.k);
            let second = substitution_matrix(
                f,
                &g.d.conj(),
                &-&g.c.conj(),
                &-&g.b.conj(),
                &g.a.conj(),
                w.l,
            );
            (first, second)
        })
    }

    /// `acc += sign * rho(g) v`, as `F Z S^T` with `v = vec(Z)`.
    fn apply_add(&mut self, g: &GroupElement, sign: i32, v: &[KElem], acc: &mut [KElem]) {
        let (k1, l1) = (self.w.k + 1, self.w.l + 1);
        let (fm, sm) = self.factors(g).clone();
        let mut t = vec![v[0].ring().zero(); k1 * l1];
        for a in 0..k1 {
            for j in 0..l1 {
                let mut s = t[a * l1 + j].clone();
                for b in 0..l1 {
                    let z = &v[a * l1 + b];
                    let y = sm.get(j, b);
                    if !z.is_zero() && !y.is_zero() {
                        s = s + z * y;
                    }
                }
                t[a * l1 + j] = s;
            }
        }
        for i in 0..k1 {
            for a in 0..k1 {
                let x = fm.get(i, a);
                if x.is_zero() {
                    continue;
                }
                for j in 0..l1 {
                    let z = &t[a * l1 + j];
                    if !z.is_zero() {
                        let prod = x * z;
                        let slot = &mut acc[i * l1 + j];
                        *slot = if sign > 0 {
                            &*slot + &prod
                        } else {
                            &*slot - &prod
                        };
                    }
                }
            }
        }
    }

    /// Column `(a, b)` of `rho(g)`.
    fn column(&mut self, g: &GroupElement, c: usize) -> Vec<KElem> {
        let l1 = self.w.l + 1;
        let (a, b) = (c / l1, c % l1);
        let (fm, sm) = self.factors(g).clone();
        let mut out = Vec::with_capacity(self.w.dim());
        for i in 0..fm.rows {
            for j in 0..sm.rows {
                out.push(fm.get(i, a) * sm.get(j, b));
            }
        }
        out
    }
}

enum BlockBasis {
    /// Columns of the group sum of a finite stabilizer.
    Columns {
        group: Vec<GroupElement>,
        cols: Vec<usize>,
    },
    /// Exact basis vectors of a cusp fixed space.
    Exact(Vec<Vec<KElem>>),
}

impl BlockBasis {
    fn len(&self) -> usize {
        match self {
            BlockBasis::Columns { cols, .. } => cols.len(),
            BlockBasis::Exact(v) => v.len(),
        }
    }

    fn reduce(&self, f: &Fp, w: Weight) -> Option<Matrix<u64>> {
        match self {
            BlockBasis::Columns { group, cols } => Some(group_sum(f, group, w).columns(cols)),
            BlockBasis::Exact(vs) => {
                let mut m = linalg::zeros(f, w.dim(), vs.len());
                for (j, v) in vs.iter().enumerate() {
                    for (i, x) in v.iter().enumerate() {
                        m.set(i, j, embed_k(f, x)?);
                    }
                }
                Some(m)
            }
        }
    }

    fn exact_columns(&self, act: &mut ExactAction) -> Vec<Vec<KElem>> {
        match self {
            BlockBasis::Columns { group, cols } => cols
                .iter()
                .map(|&c| {
                    let mut acc: Option<Vec<KElem>> = None;
                    for g in group {
                        let col = act.column(g, c);
                        acc = Some(match acc {
                            None => col,
                            Some(a) => a.iter().zip(&col).map(|(x, y)| x + y).collect(),
                        });
                    }
                    acc.expect("nonempty group")
                })
                .collect(),
            BlockBasis::Exact(vs) => vs.clone(),
        }
    }
}

fn to_blocks(mats: Vec<Matrix<u64>>) -> Vec<Block<u64>> {
    mats.into_iter()
        .map(|basis| Block { basis, torus: None })
        .collect()
}

struct Setup<'a> {
    complex: &'a FloegeComplex,
    w: Weight,
    bases: [Vec<BlockBasis>; 3],
}

impl Setup<'_> {
    /// `d_0`, `d_1` modulo a degree-one prime, or `None` if a basis vector is not `p`-integral.
    fn reduce(&self, f: &Fp) -> Option<[Matrix<u64>; 2]> {
        let mut blocks: [Vec<Block<u64>>; 2] = Default::default();
        for d in 0..2 {
            let mats: Option<Vec<_>> = self.bases[d].iter().map(|b| b.reduce(f, self.w)).collect();
            blocks[d] = to_blocks(mats?);
        }
        let mut cache = HashMap::new();
        let s1 = boundary_sums(f, self.complex, 1, self.w, &mut cache);
        let s2 = boundary_sums(f, self.complex, 2, self.w, &mut cache);
        Some([
            assemble(f, &s1, &blocks[0], self.w),
            assemble(f, &s2, &blocks[1], self.w),
        ])
    }

    /// `d_0` in the invariant coordinates of the edge blocks, so that it composes with `d_1`.
    fn d0_invariant(&self, f: &Fp, d0: &Matrix<u64>) -> Option<Matrix<u64>> {
        let dim = self.w.dim();
        let mut out = Matrix {
            rows: 0,
            cols: d0.cols,
            data: Vec::new(),
        };
        for (e, basis) in self.bases[1].iter().enumerate() {
            let b = basis.reduce(f, self.w)?;
            let mut bt = b.transpose();
            let rows = linalg::rref(f, &mut bt);
            if rows.len() < b.cols {
                return None;
            }
            let square = b.transpose().columns(&rows).transpose();
            let inv = inverse(f, &square)?;
            let picked: Vec<u64> = rows
                .iter()
                .flat_map(|&r| d0.row(e * dim + r).to_vec())
                .collect();
            let picked = Matrix {
                rows: rows.len(),
                cols: d0.cols,
                data: picked,
            };
            out = out.stack(&linalg::mul(f, &inv, &picked));
        }
        Some(out)
    }

    /// `d_p v` over `K`, in ambient coordinates of the `(p+1)`-cells.
    fn apply_exact(
        &self,
        p: usize,
        exact_bases: &[Vec<Vec<KElem>>],
        act: &mut ExactAction,
        v: &[KElem],
    ) -> Vec<KElem> {
        let dim = self.w.dim();
        let zero = self.complex.ring.zero();
        // ambient values on source representatives
        let mut ambient = Vec::with_capacity(exact_bases.len());
        let mut offset = 0;
        for cols in exact_bases {
            let mut u = vec![zero.clone(); dim];
            for (j, col) in cols.iter().enumerate() {
                let c = &v[offset + j];
                if c.is_zero() {
                    continue;
                }
                for (x, y) in u.iter_mut().zip(col) {
                    if !y.is_zero() {
                        *x = &*x + &(c * y);
                    }
                }
            }
            offset += cols.len();
            ambient.push(u);
        }
        let targets = &self.complex.cells[p + 1];
        let mut out = vec![zero; dim * targets.len()];
        for (t, cell) in targets.iter().enumerate() {
            for term in &cell.boundary {
                act.apply_add(
                    &term.element,
                    term.sign,
                    &ambient[term.face],
                    &mut out[t * dim..(t + 1) * dim],
                );
            }
        }
        out
    }
}

fn inverse(f: &Fp, a: &Matrix<u64>) -> Option<Matrix<u64>> {
    let n = a.rows;
    let mut aug = linalg::zeros(f, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, *a.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let pivots = linalg::rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.columns(&(n..2 * n).collect::<Vec<_>>()))
}

/// Reconstructs an exact basis of the joint fixed space of `gens`.
fn exact_fixed_space(ring: Ring, gens: &[GroupElement], w: Weight) -> Option<Vec<Vec<KElem>>> {
    let canonical = |f: &Fp| {
        let one = linalg::identity(f, w.dim());
        let mut stacked = Matrix {
            rows: 0,
            cols: w.dim(),
            data: Vec::new(),
        };
        for g in gens {
            stacked = stacked.stack(&linalg::sub(f, &action_matrix(f, g, w), &one));
        }
        let (pivots, vectors) = echelon_kernel(f, &stacked, None);
        Some(Canonical {
            signature: pivots,
            vectors,
        })
    };
    let verify = |vs: &[Vec<KElem>]| {
        let mut act = ExactAction::new(ring, w);
        let zero = ring.zero();
        vs.iter().all(|v| {
            gens.iter().all(|g| {
                let mut acc = vec![zero.clone(); v.len()];
                act.apply_add(g, 1, v, &mut acc);
                acc == *v
            })
        })
    };
    reconstruct(ring, canonical, verify).map(|(v, _)| v)
}

/// Certified ranks of `d_0` and `d_1` over `K` for the weight `w`.
pub fn k_rational_rank(
    complex: &FloegeComplex,
    w: impl Into<Weight>,
) -> Result<KRanks, CohomologyError> {
    let w = w.into();
    let ring = complex.ring;
    complex.check_boundary_squared()?;
    let p0 = split_primes(ring).next().expect("split primes exist");
    let f0 = Fp::new(ring, p0, false).expect("split prime");
    let mut bases: [Vec<BlockBasis>; 3] = Default::default();
    let mut cusps = Vec::new();
    for (d, cells) in complex.cells.iter().enumerate() {
        for cell in cells {
            let basis = match (&cell.stabilizer, &cell.cusp) {
                (Some(st), _) => {
                    let group = close_group(st, 24)?;
                    let mut g = group_sum(&f0, &group, w);
                    let cols = linalg::rref(&f0, &mut g);
                    BlockBasis::Columns { group, cols }
                }
                (None, Some(c)) => {
                    let vs = exact_fixed_space(ring, &c.generators, w)
                        .ok_or(CohomologyError::Reconstruction)?;
                    // E_{k,l} is self-dual and Z^2 has Euler characteristic 0,
                    // so H^2 = H_0 has the dimension of H^0
                    cusps.push((vs.len(), 2 * vs.len(), vs.len()));
                    BlockBasis::Exact(vs)
                }
                (None, None) => unreachable!("orbit without stabilizer data"),
            };
            bases[d].push(basis);
        }
    }
    let e1 = [0, 1, 2].map(|d| bases[d].iter().map(BlockBasis::len).sum::<usize>());
    let setup = Setup { complex, w, bases };
    let [a0, a1] = setup.reduce(&f0).ok_or(CohomologyError::Reconstruction)?;
    let (r0, r1) = (linalg::rank(&f0, &a0), linalg::rank(&f0, &a1));

    let mut act = ExactAction::new(ring, w);
    let exact: [Vec<Vec<Vec<KElem>>>; 2] = [0, 1].map(|d| {
        setup.bases[d]
            .iter()
            .map(|b| b.exact_columns(&mut act))
            .collect()
    });
    let mut used = 0;

    // d0: its full echelon kernel
    let d0 = match reconstruct(
        ring,
        |f| {
            let [a, _] = setup.reduce(f)?;
            let (signature, vectors) = echelon_kernel(f, &a, None);
            Some(Canonical { signature, vectors })
        },
        |vs| {
            let mut act = ExactAction::new(ring, w);
            vs.iter().all(|v| {
                setup
                    .apply_exact(0, &exact[0], &mut act, v)
                    .iter()
                    .all(KElem::is_zero)
            })
        },
    ) {
        Some((vs, n)) if vs.len() == e1[0] - r0 => {
            used = used.max(n);
            CertifiedRank {
                lower: r0,
                upper: r0,
            }
        }
        _ => CertifiedRank {
            lower: r0,
            upper: e1[0].min(a0.rows),
        },
    };

    // d1: a complement of im d0 in ker d1, in echelon form on the free columns of d1
    let complement = |f: &Fp| -> Option<Canonical> {
        let [a, b1] = setup.reduce(f)?;
        let b0 = setup.d0_invariant(f, &a)?;
        let mut r = b1.clone();
        let pivots = linalg::rref(f, &mut r);
        let free: Vec<usize> = (0..b1.cols).filter(|c| !pivots.contains(c)).collect();
        let projected = b0.transpose().columns(&free);
        let mut pr = projected.clone();
        let covered: Vec<usize> = linalg::rref(f, &mut pr)
            .into_iter()
            .map(|i| free[i])
            .collect();
        let wanted: Vec<usize> = free
            .iter()
            .copied()
            .filter(|c| !covered.contains(c))
            .collect();
        let (_, vectors) = echelon_kernel(f, &b1, Some(&wanted));
        let mut signature = pivots;
        signature.push(usize::MAX);
        signature.extend(covered);
        Some(Canonical { signature, vectors })
    };
    let d1 = match (
        d0.exact(),
        reconstruct(ring, complement, |vs| {
            let mut act = ExactAction::new(ring, w);
            vs.iter().all(|v| {
                setup
                    .apply_exact(1, &exact[1], &mut act, v)
                    .iter()
                    .all(KElem::is_zero)
            })
        }),
    ) {
        (Some(rank0), Some((vs, n))) => {
            used = used.max(n);
            // independence of im d0 and the complement, checked modulo p0
            let mut joint = setup
                .d0_invariant(&f0, &a0)
                .ok_or(CohomologyError::Reconstruction)?
                .transpose();
            for v in &vs {
                let row: Option<Vec<u64>> = v.iter().map(|x| embed_k(&f0, x)).collect();
                let row = row.ok_or(CohomologyError::Reconstruction)?;
                joint = joint.stack(&Matrix {
                    rows: 1,
                    cols: row.len(),
                    data: row,
                });
            }
            let _ = rank0;
            CertifiedRank {
                lower: r1,
                upper: e1[1] - linalg::rank(&f0, &joint),
            }
        }
        (Some(rank0), None) => CertifiedRank {
            lower: r1,
            upper: e1[1] - rank0,
        },
        (None, _) => CertifiedRank {
            lower: r1,
            upper: e1[1].min(a1.rows),
        },
    };
    Ok(KRanks {
        e1,
        d0,
        d1,
        cusps,
        primes_used: used,
    })
}
