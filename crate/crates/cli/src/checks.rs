//! The invariant suite behind `bianchi verify`.

use bianchi::arith::{rat, KElem};
use bianchi::cellcomplex::FloegeComplex;
use bianchi::coefficients::linalg::mul;
use bianchi::coefficients::{good_primes, invariants, splitting, Fp, KField, Splitting};
use bianchi::cohomology::{
    h2_dimension, k_report, modp_report, quotient_cohomology, EquivariantComplex,
};
use bianchi::geometry::reduce_to_rectangle;
use bianchi::swan::Polyhedron;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        pass,
        detail: detail.into(),
    }
}

/// Points of a `side x side` lattice in `D0` with odd denominators, reduced
/// into the half-open rectangle.
pub fn lattice_points(poly: &Polyhedron, side: i64) -> Vec<KElem> {
    let ring = poly.ctx.ring;
    let (dx, dy) = (2 * side + 1, 2 * side + 3);
    let mut out = Vec::new();
    for i in 0..side {
        for j in 0..side {
            let z = KElem::new(ring, rat(2 * i + 1, dx) - rat(1, 2), rat(2 * j + 1, dy));
            out.push(reduce_to_rectangle(&z).0);
        }
    }
    out
}

/// Non-singular lattice points not strictly below a hemisphere.
pub fn uncovered(poly: &Polyhedron, points: &[KElem]) -> usize {
    points
        .iter()
        .filter(|z| !poly.is_singular(z) && poly.covering_hemisphere(z).is_none())
        .count()
}

/// Runs every check; a check that errors is reported as failing.
pub fn run(poly: &Polyhedron, complex: &FloegeComplex, prime_cap: u64) -> Vec<Check> {
    let mut out = Vec::new();
    if let Err(e) = run_into(&mut out, poly, complex, prime_cap) {
        out.push(check("evaluation", false, format!("{e:#}")));
    }
    out
}

fn run_into(
    out: &mut Vec<Check>,
    poly: &Polyhedron,
    complex: &FloegeComplex,
    prime_cap: u64,
) -> anyhow::Result<()> {
    let ring = complex.ring;

    let violations = poly.certificate_violations().len();
    let points = lattice_points(poly, 32);
    let missed = uncovered(poly, &points);
    out.push(check(
        "termination certificate",
        violations == 0 && missed == 0,
        format!(
            "{violations} vertices below a hemisphere, {missed} of {} lattice points uncovered",
            points.len()
        ),
    ));

    out.push(check(
        "cellular boundary squared",
        complex.check_boundary_squared().is_ok(),
        complex
            .check_boundary_squared()
            .err()
            .map_or("ok".into(), |e| e.to_string()),
    ));

    let p = good_primes(ring, prime_cap)
        .into_iter()
        .find(|&p| splitting(ring, p) == Splitting::Split)
        .ok_or_else(|| anyhow::anyhow!("no split prime below {prime_cap}"))?;
    let f = Fp::new(ring, p, false)?;
    let mut vanish = Vec::new();
    for n in 0..=2 {
        vanish.push(EquivariantComplex::build(&f, complex, n)?.composition_vanishes());
    }
    vanish.push(EquivariantComplex::build(&KField { ring }, complex, 1)?.composition_vanishes());
    out.push(check(
        "d1 d0 = 0",
        vanish.iter().all(|&v| v),
        format!("n=0..2 mod {p}, n=1 over K: {vanish:?}"),
    ));

    let mut idempotent = 0;
    let mut total = 0;
    for cell in complex.cells.iter().flatten() {
        if let Some(st) = &cell.stabilizer {
            for n in 0..=3 {
                let inv = invariants(&f, st, n)?;
                total += 1;
                idempotent += usize::from(mul(&f, &inv.projector, &inv.projector) == inv.projector);
            }
        }
    }
    out.push(check(
        "projector idempotence",
        idempotent == total,
        format!("{idempotent}/{total} mod {p}"),
    ));

    let mut monotone = true;
    let mut rows = Vec::new();
    for n in 0..=2 {
        let (k, _) = k_report(complex, n)?;
        let primes = good_primes(ring, prime_cap);
        let mut equal = 0;
        for &q in &primes {
            let r = modp_report(complex, n, q)?;
            monotone &= r.e2.iter().zip(&k.e2).all(|(a, b)| a >= b) && r.h2_upper >= k.h2_upper;
            equal += usize::from(r.e2 == k.e2);
        }
        monotone &= k.certified && equal > 0;
        rows.push(format!("n={n}: {equal}/{} primes equal K", primes.len()));
    }
    out.push(check("universal coefficients", monotone, rows.join(", ")));

    let kf = KField { ring };
    let e2 = h2_dimension(&kf, complex, 0)?.e2;
    let q = quotient_cohomology(&kf, complex)?;
    out.push(check(
        "trivial coefficients",
        e2 == q,
        format!("E2 {e2:?}, quotient {q:?}"),
    ));
    Ok(())
}
