//! `H^1(Γ, E_{n,n})` from a presentation of `PSL_2(O)` by Fox calculus, with
//! the trace of the Galois conjugation.
//!
//! Generators are `A = (0 -1; 1 0)`, `T = (1 1; 0 1)` and `U = (1 ω; 0 1)`;
//! lower case letters are inverses. Conjugation of matrix entries is realised
//! on `Γ` by the words in [`conjugation_words`] (up to `±I`), and on the
//! coefficients by `x ⊗ y -> S(w) y ⊗ S(w)^{-1} x` with `w = A`.

use bianchi::arith::Ring;
use bianchi::cellcomplex::GroupElement;
use bianchi::coefficients::linalg::{self, Matrix};
use bianchi::coefficients::{
    action_matrix, is_prime, splitting, substitution_matrix, Field, Fp, Splitting,
};

type M = Matrix<u64>;
pub type Word = Vec<(usize, bool)>;

pub fn parse(s: &str) -> Word {
    s.chars()
        .map(|c| {
            let g = "ATU"
                .find(c.to_ascii_uppercase())
                .expect("letter A, T or U");
            (g, c.is_ascii_lowercase())
        })
        .collect()
}

pub fn generators(ring: Ring) -> [GroupElement; 3] {
    [
        GroupElement::new(ring.zero(), -ring.one(), ring.one(), ring.zero()),
        GroupElement::translation(&ring.one()),
        GroupElement::translation(&ring.omega()),
    ]
}

pub fn evaluate(gens: &[GroupElement], w: &Word) -> GroupElement {
    let mut g = GroupElement::identity(gens[0].ring());
    for &(i, inv) in w {
        g = &g
            * &if inv {
                gens[i].inverse()
            } else {
                gens[i].clone()
            };
    }
    g
}

fn is_trivial(g: &GroupElement) -> bool {
    g.is_identity() || g.neg().is_identity()
}

/// Relators of the form `A w_1 A w_2 ...` with `w_i` short translation words,
/// found by search, together with `A^2` and `[T, U]`.
pub fn searched_relators(ring: Ring, depth: usize) -> Vec<Word> {
    let gens = generators(ring);
    let mut rels = vec![parse("AA"), parse("TUtu")];
    let blocks = ["T", "t", "U", "u", "TU", "Tu", "tU", "tu"];
    let mut frontier = vec![String::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for b in blocks {
                let nw = format!("{w}A{b}");
                if is_trivial(&evaluate(&gens, &parse(&nw))) {
                    rels.push(parse(&nw));
                } else {
                    next.push(nw);
                }
            }
        }
        frontier = next;
    }
    rels
}

/// Swan's presentation of `PSL_2(Z[sqrt(-2)])`.
pub fn presentation_m2() -> Vec<Word> {
    ["AA", "TATATA", "uAUAuAUA", "TUtu"]
        .iter()
        .map(|s| parse(s))
        .collect()
}

pub fn conjugation_words(ring: Ring) -> Vec<Word> {
    let w = if ring.is_three_mod_four() {
        ["A", "T", "tu"]
    } else {
        ["A", "T", "u"]
    };
    w.iter().map(|s| parse(s)).collect()
}

/// Fox derivative block row of a relator: `dim x (gens * dim)`.
fn fox_rows(f: &Fp, rho: &[M], rho_inv: &[M], w: &Word, dim: usize) -> M {
    let mut block = linalg::zeros(f, dim, rho.len() * dim);
    let mut prefix = linalg::identity(f, dim);
    for &(g, inv) in w {
        let term = if inv {
            linalg::scale(f, &f.neg(&1), &linalg::mul(f, &prefix, &rho_inv[g]))
        } else {
            prefix.clone()
        };
        for i in 0..dim {
            for j in 0..dim {
                let v = f.add(block.get(i, g * dim + j), term.get(i, j));
                block.set(i, g * dim + j, v);
            }
        }
        prefix = linalg::mul(f, &prefix, if inv { &rho_inv[g] } else { &rho[g] });
    }
    block
}

/// A split prime close to `2^31`.
pub fn large_split_prime(ring: Ring) -> u64 {
    (0..)
        .map(|k| 2147483647u64 - 2 * k)
        .find(|&q| is_prime(q) && splitting(ring, q) == Splitting::Split)
        .unwrap()
}

/// `(dim H^1, trace of conjugation on H^1)` modulo a large split prime.
pub fn h1_with_conjugation_trace(ring: Ring, rels: &[Word], n: usize) -> (usize, i64) {
    let f = Fp::new(ring, large_split_prime(ring), false).unwrap();
    let gens = generators(ring);
    let dim = (n + 1) * (n + 1);
    let ng = gens.len();
    let rho: Vec<M> = gens.iter().map(|g| action_matrix(&f, g, n)).collect();
    let rho_inv: Vec<M> = gens
        .iter()
        .map(|g| action_matrix(&f, &g.inverse(), n))
        .collect();
    let mut stacked = linalg::zeros(&f, 0, ng * dim);
    for w in rels {
        stacked = stacked.stack(&fox_rows(&f, &rho, &rho_inv, w, dim));
    }
    let cocycles = linalg::kernel(&f, &stacked);
    let mut coboundary = linalg::zeros(&f, ng * dim, dim);
    for (i, r) in rho.iter().enumerate() {
        let d = linalg::sub(&f, r, &linalg::identity(&f, dim));
        for a in 0..dim {
            for b in 0..dim {
                coboundary.set(i * dim + a, b, *d.get(a, b));
            }
        }
    }
    let boundaries = linalg::column_basis(&f, &coboundary);
    assert!(cocycles.cols >= boundaries.cols, "relators do not hold");

    // conjugation on cocycles: z -> tau z(conj word)
    let (o, one, mone) = (0u64, 1u64, f.neg(&1));
    let s = substitution_matrix(&f, &o, &one, &mone, &o, n);
    let s_inv = substitution_matrix(&f, &o, &mone, &one, &o, n);
    let d1 = n + 1;
    let mut swap = linalg::zeros(&f, dim, dim);
    for a in 0..d1 {
        for b in 0..d1 {
            swap.set(b * d1 + a, a * d1 + b, 1);
        }
    }
    let tau = linalg::mul(&f, &linalg::kron(&f, &s_inv, &s), &swap);
    let mut sigma = linalg::zeros(&f, ng * dim, ng * dim);
    for (i, w) in conjugation_words(ring).iter().enumerate() {
        let blk = linalg::mul(&f, &tau, &fox_rows(&f, &rho, &rho_inv, w, dim));
        for a in 0..dim {
            for b in 0..ng * dim {
                sigma.set(i * dim + a, b, *blk.get(a, b));
            }
        }
    }

    // basis of Z^1 extending B^1, then the trace on the quotient
    let mut q = boundaries.clone();
    for j in 0..cocycles.cols {
        let cand = q
            .transpose()
            .stack(&cocycles.columns(&[j]).transpose())
            .transpose();
        if linalg::rank(&f, &cand) > q.cols {
            q = cand;
        }
    }
    let sq = linalg::mul(&f, &sigma, &q);
    let mut aug = q.transpose().stack(&sq.transpose()).transpose();
    let piv = linalg::rref(&f, &mut aug);
    assert!(
        piv.len() == q.cols && piv[q.cols - 1] == q.cols - 1,
        "conjugation does not preserve Z^1"
    );
    let mut tr = 0u64;
    for j in boundaries.cols..q.cols {
        tr = f.add(&tr, aug.get(j, q.cols + j));
    }
    let tr = if tr > f.p / 2 {
        tr as i64 - f.p as i64
    } else {
        tr as i64
    };
    (q.cols - boundaries.cols, tr)
}

/// Lift dimension from the conjugation trace for class number one: the
/// Eisenstein class and twisted lifts carry sign `(-1)^(n+1)`, base changes
/// from level one carry `(-1)^n`, and non-lifted pairs have trace zero.
pub fn lift_dimension_from_trace(trace: i64, n: usize, level_one: i64) -> i64 {
    let s = if n % 2 == 0 { -1 } else { 1 };
    s * trace - 1 + 2 * level_one
}
