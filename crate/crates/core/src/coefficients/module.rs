//! The module `E_{n,n} = Sym^n ⊗ conj(Sym^n)`.
//!
//! Basis vector `(a, b)` with `0 <= a, b <= n` is `x^a y^(n-a) ⊗ x^b y^(n-b)`,
//! stored at index `a (n+1) + b`. The first factor is acted on by the
//! substitution `(x, y) -> (a x + c y, b x + d y)`, which is a left action.
//! The second factor uses the same substitution for `(conj d, -conj c; -conj b, conj a)`,
//! the inverse transpose of the conjugate. It is isomorphic to the conjugate
//! of `Sym^n`, and with it `x^n ⊗ y^n` is fixed by the unipotent translations.

use super::field::Field;
use super::linalg::{identity, kernel, kron, rank, rref, scale, sub, zeros, Matrix};
use crate::arith::KElem;
use crate::cellcomplex::GroupElement;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("generated group exceeds order {0}")]
    TooLarge(usize),
    #[error("group order {0} is not invertible in the field")]
    OrderNotInvertible(usize),
    #[error("torus generators do not commute")]
    NotCommuting,
}

pub fn dimension(n: usize) -> usize {
    (n + 1) * (n + 1)
}

/// `E_{k,l} = Sym^k ⊗ conj(Sym^l)`; a bare `n` means `(n, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub k: usize,
    pub l: usize,
}

impl Weight {
    pub fn dim(&self) -> usize {
        (self.k + 1) * (self.l + 1)
    }
}

impl From<usize> for Weight {
    fn from(n: usize) -> Self {
        Weight { k: n, l: n }
    }
}

impl From<(usize, usize)> for Weight {
    fn from((k, l): (usize, usize)) -> Self {
        Weight { k, l }
    }
}

pub fn index(n: usize, a: usize, b: usize) -> usize {
    a * (n + 1) + b
}

/// Matrix of `P -> P(a x + c y, b x + d y)` on `Sym^n`, basis `x^i y^(n-i)`.
pub fn substitution_matrix<F: Field>(
    f: &F,
    a: &F::E,
    b: &F::E,
    c: &F::E,
    d: &F::E,
    n: usize,
) -> Matrix<F::E> {
    // powers of the two linear forms as coefficient vectors indexed by the x-degree
    let power = |u: &F::E, v: &F::E, k: usize| -> Vec<F::E> {
        // (u x + v y)^k
        let mut p = vec![f.one()];
        for _ in 0..k {
            let mut q = vec![f.zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i + 1] = f.add(&q[i + 1], &f.mul(c, u));
                q[i] = f.add(&q[i], &f.mul(c, v));
            }
            p = q;
        }
        p
    };
    let mut m = zeros(f, n + 1, n + 1);
    for j in 0..=n {
        let p1 = power(a, c, j);
        let p2 = power(b, d, n - j);
        for (i1, c1) in p1.iter().enumerate() {
            if f.is_zero(c1) {
                continue;
            }
            for (i2, c2) in p2.iter().enumerate() {
                let v = f.add(m.get(i1 + i2, j), &f.mul(c1, c2));
                m.set(i1 + i2, j, v);
            }
        }
    }
    m
}

/// Matrix of `g` on `E_{n,n}`; `action_matrix(g h) = action_matrix(g) action_matrix(h)`.
pub fn action_matrix<F: Field>(f: &F, g: &GroupElement, w: impl Into<Weight>) -> Matrix<F::E> {
    let w = w.into();
    let first = substitution_matrix(
        f,
        &f.embed(&g.a),
        &f.embed(&g.b),
        &f.embed(&g.c),
        &f.embed(&g.d),
        w.k,
    );
    let second = substitution_matrix(
        f,
        &f.embed_conj(&g.d),
        &f.neg(&f.embed_conj(&g.c)),
        &f.neg(&f.embed_conj(&g.b)),
        &f.embed_conj(&g.a),
        w.l,
    );
    kron(f, &first, &second)
}

/// Closes a finite set of generators under multiplication.
pub fn close_group(gens: &[GroupElement], limit: usize) -> Result<Vec<GroupElement>, ModuleError> {
    let ring = gens.first().map(|g| g.ring());
    let mut elems: Vec<GroupElement> = match ring {
        Some(r) => vec![GroupElement::identity(r)],
        None => return Ok(Vec::new()),
    };
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let h = &elems[i] * g;
            if !elems.contains(&h) {
                if elems.len() == limit {
                    return Err(ModuleError::TooLarge(limit));
                }
                elems.push(h);
            }
        }
        i += 1;
    }
    elems.sort();
    Ok(elems)
}

/// The invariants of a finite group, with its averaging projector.
#[derive(Clone, Debug)]
pub struct Invariants<E> {
    pub order: usize,
    pub projector: Matrix<E>,
    /// Columns span the invariant subspace.
    pub basis: Matrix<E>,
}

impl<E> Invariants<E> {
    pub fn dim(&self) -> usize {
        self.basis.cols
    }
}

/// `|G| P = sum_g action_matrix(g)` over the group generated by `gens`.
pub fn group_sum<F: Field>(f: &F, group: &[GroupElement], w: impl Into<Weight>) -> Matrix<F::E> {
    let w = w.into();
    let dim = w.dim();
    let mut s = zeros(f, dim, dim);
    for g in group {
        let a = action_matrix(f, g, w);
        for (x, y) in s.data.iter_mut().zip(&a.data) {
            *x = f.add(x, y);
        }
    }
    s
}

pub fn invariants<F: Field>(
    f: &F,
    gens: &[GroupElement],
    w: impl Into<Weight>,
) -> Result<Invariants<F::E>, ModuleError> {
    let w = w.into();
    let group = close_group(gens, 24)?;
    let order = group.len().max(1);
    let inv = f
        .inv(&f.from_int(order as i64))
        .ok_or(ModuleError::OrderNotInvertible(order))?;
    let projector = if group.is_empty() {
        identity(f, w.dim())
    } else {
        scale(f, &inv, &group_sum(f, &group, w))
    };
    let mut r = projector.clone();
    let pivots = rref(f, &mut r);
    let basis = projector.columns(&pivots);
    Ok(Invariants {
        order,
        projector,
        basis,
    })
}

/// Joint fixed space of elements, as kernel columns.
pub fn fixed_space<F: Field>(f: &F, elems: &[GroupElement], w: impl Into<Weight>) -> Matrix<F::E> {
    let w = w.into();
    let dim = w.dim();
    let one = identity(f, dim);
    let mut stacked = Matrix {
        rows: 0,
        cols: dim,
        data: Vec::new(),
    };
    for g in elems {
        stacked = stacked.stack(&sub(f, &action_matrix(f, g, w), &one));
    }
    kernel(f, &stacked)
}

/// Fixed space of the translations `(1 t; 0 1)` for the given `t`.
pub fn unipotent_invariants<F: Field>(f: &F, translations: &[KElem], n: usize) -> Matrix<F::E> {
    let elems: Vec<GroupElement> = translations.iter().map(GroupElement::translation).collect();
    if elems.is_empty() {
        return identity(f, dimension(n));
    }
    fixed_space(f, &elems, n)
}

/// Dimensions `(H^0, H^1, H^2)` of the group generated by two commuting
/// elements of infinite order acting through `E_{n,n}` (Koszul complex).
pub fn torus_cohomology<F: Field>(
    f: &F,
    g1: &GroupElement,
    g2: &GroupElement,
    w: impl Into<Weight>,
) -> Result<(usize, usize, usize), ModuleError> {
    if g1 * g2 != g2 * g1 {
        return Err(ModuleError::NotCommuting);
    }
    let w = w.into();
    let dim = w.dim();
    let one = identity(f, dim);
    let a = sub(f, &action_matrix(f, g1, w), &one);
    let b = sub(f, &action_matrix(f, g2, w), &one);
    // d0 v = (A v, B v); d1 (u, w) = B u - A w
    let d0 = a.stack(&b);
    let neg_a = scale(f, &f.neg(&f.one()), &a);
    let mut d1 = zeros(f, dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            d1.set(i, j, b.get(i, j).clone());
            d1.set(i, dim + j, neg_a.get(i, j).clone());
        }
    }
    let r0 = rank(f, &d0);
    let r1 = rank(f, &d1);
    Ok((dim - r0, 2 * dim - r1 - r0, dim - r1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Ring;
    use crate::coefficients::field::{Fp, KField};
    use crate::coefficients::linalg::mul;

    fn s(ring: Ring) -> GroupElement {
        GroupElement::new(ring.zero(), -ring.one(), ring.one(), ring.zero())
    }

    #[test]
    fn identity_and_minus_identity_act_trivially() {
        let ring = Ring::new(2).unwrap();
        let f = KField { ring };
        for n in 0..4 {
            let id = identity(&f, dimension(n));
            assert_eq!(action_matrix(&f, &GroupElement::identity(ring), n), id);
            assert_eq!(
                action_matrix(&f, &GroupElement::minus_identity(ring), n),
                id
            );
        }
    }

    #[test]
    fn homomorphism_on_generators() {
        let ring = Ring::new(7).unwrap();
        let f = KField { ring };
        let t = GroupElement::translation(&ring.omega());
        let g = &s(ring) * &t;
        for n in 0..4 {
            let lhs = action_matrix(&f, &(&g * &t), n);
            let rhs = mul(&f, &action_matrix(&f, &g, n), &action_matrix(&f, &t, n));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unit_translation_n1() {
        let ring = Ring::new(2).unwrap();
        let f = KField { ring };
        let t = GroupElement::translation(&ring.one());
        let m = action_matrix(&f, &t, 1);
        // basis (y, x); y -> x + y on the first factor, x -> x - y on the second
        let e = |r| ring.elem(r, 0);
        let first = [[e(1), e(0)], [e(1), e(1)]];
        let second = [[e(1), e(-1)], [e(0), e(1)]];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(*m.get(2 * i + k, 2 * j + l), &first[i][j] * &second[k][l]);
                    }
                }
            }
        }
    }

    #[test]
    fn stabilizer_invariants_two_ways() {
        let ring = Ring::new(2).unwrap();
        let f = KField { ring };
        let group = vec![s(ring)];
        let inv = invariants(&f, &group, 2).unwrap();
        assert_eq!(inv.order, 4);
        assert_eq!(inv.dim(), fixed_space(&f, &group, 2).cols);
        assert_eq!(mul(&f, &inv.projector, &inv.projector), inv.projector);
    }

    #[test]
    fn translation_invariants() {
        let ring = Ring::new(2).unwrap();
        let f = KField { ring };
        let full = unipotent_invariants(&f, &[ring.one(), ring.omega()], 3);
        assert_eq!(full.cols, 1);
        let v = index(3, 3, 0);
        for i in 0..full.rows {
            assert_eq!(f.is_zero(full.get(i, 0)), i != v);
        }
        let single = unipotent_invariants(&f, &[ring.elem(1, 1)], 1);
        assert_eq!(single.cols, 2);
    }

    #[test]
    fn torus_cohomology_of_translations() {
        let ring = Ring::new(5).unwrap();
        let t1 = GroupElement::translation(&ring.one());
        let t2 = GroupElement::translation(&ring.omega());
        let f = Fp::new(ring, 29, false).unwrap();
        for n in 0..5 {
            assert_eq!(torus_cohomology(&f, &t1, &t2, n).unwrap(), (1, 2, 1));
        }
        assert_eq!(
            torus_cohomology(&f, &t1, &s(ring), 1),
            Err(ModuleError::NotCommuting)
        );
    }
}
