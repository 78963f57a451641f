//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact (integers and rationals); there are no numeric
//! tolerances. Criteria listed in `KNOWN_FAILING` are expected to print FAIL;
//! the test fails if the set of failing criteria differs from it.

mod common;

use bianchi::arith::{field_context, int, rat, KElem};
use bianchi::cellcomplex::{build_complex, FloegeComplex, GroupElement};
use bianchi::coefficients::linalg;
use bianchi::coefficients::{
    action_matrix, good_primes, index, invariants, splitting, torus_cohomology,
    unipotent_invariants, Field, Fp, KField, Splitting,
};
use bianchi::cohomology::{
    eisenstein_dimension, h2_dimension, k_report, modp_report, modp_sweep, quotient_cohomology,
    Certification, EquivariantComplex, LiftTable,
};
use bianchi::geometry::reduce_to_rectangle;
use bianchi::swan::{compute_polyhedron, Polyhedron};
use common::{lifts, singular};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::OnceLock;

/// Criteria that cannot be met as stated; see the FAIL line for the observed values.
const KNOWN_FAILING: &[u32] = &[6];

const CLASS_ONE: [i64; 7] = [2, 7, 11, 19, 43, 67, 163];
const CLASS_TWO: [i64; 5] = [5, 6, 10, 13, 15];
/// Further fields for the singular-cusp census (class numbers 3 and 4).
const CENSUS_EXTRA: [i64; 3] = [14, 17, 23];

struct FieldData {
    poly: Polyhedron,
    complex: FloegeComplex,
}

fn field(m: i64) -> &'static FieldData {
    static CACHE: OnceLock<std::sync::Mutex<BTreeMap<i64, &'static FieldData>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&m) {
        return d;
    }
    let poly = compute_polyhedron(&field_context(m).unwrap()).unwrap();
    let complex = build_complex(&poly).unwrap();
    let data: &'static FieldData = Box::leak(Box::new(FieldData { poly, complex }));
    cache.lock().unwrap().insert(m, data);
    data
}

fn all_fields() -> Vec<i64> {
    CLASS_ONE.iter().chain(&CLASS_TWO).copied().collect()
}

fn lift_table() -> LiftTable {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/lifts.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn abs_disc(m: i64) -> i64 {
    -lifts::fundamental_discriminant(m)
}

fn bound_class_one() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in CLASS_ONE {
        let d = abs_disc(m);
        let max = field(m).poly.max_mu_norm();
        let bound = rat(d + 1, 2);
        pass &= max <= bound;
        parts.push(format!("m={m}: {max}<={bound}"));
    }
    outcome(
        pass,
        format!("max N(mu) vs (|D|+1)/2: {}", parts.join(", ")),
    )
}

fn bound_class_two() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in CLASS_TWO {
        let d = abs_disc(m);
        let max = field(m).poly.max_mu_norm();
        let bound = if m % 4 == 3 {
            int(3 * d)
        } else {
            rat(5 * 116 + 61, 116) * int(d)
        };
        pass &= max <= bound;
        parts.push(format!("m={m}: {max}<={bound}"));
    }
    outcome(pass, format!("max N(mu): {}", parts.join(", ")))
}

fn random_point(rng: &mut StdRng, m: i64) -> KElem {
    let ring = field(m).complex.ring;
    let den = rng.gen_range(2..1000i64);
    let x = rat(rng.gen_range(-2 * den..2 * den), den);
    let y = rat(rng.gen_range(-2 * den..2 * den), den);
    reduce_to_rectangle(&KElem::new(ring, x, y)).0
}

fn termination_certificate() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut pass = true;
    let mut pairs = 0;
    let mut bad = Vec::new();
    for m in all_fields() {
        let poly = &field(m).poly;
        pairs += poly.vertices.len() * poly.list.entries.len();
        let v = poly.certificate_violations();
        if !v.is_empty() {
            pass = false;
            bad.push(format!("m={m}: {} vertices below", v.len()));
        }
        let mut tested = 0;
        while tested < 1000 {
            let z = random_point(&mut rng, m);
            if poly.is_singular(&z) {
                continue;
            }
            tested += 1;
            if poly.covering_hemisphere(&z).is_none() {
                pass = false;
                bad.push(format!("m={m}: {z} uncovered"));
                break;
            }
        }
    }
    outcome(
        pass,
        format!(
            "{} fields, {pairs} vertex/hemisphere pairs exact, 1000 random points each{}",
            all_fields().len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; {}", bad.join("; "))
            }
        ),
    )
}

fn singular_census() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in CLASS_ONE
        .iter()
        .chain(&CLASS_TWO)
        .chain(&CENSUS_EXTRA)
        .copied()
        .filter(|&m| m <= 100)
    {
        let poly = compute_polyhedron(&field_context(m).unwrap()).unwrap();
        let h = lifts::class_number(lifts::fundamental_discriminant(m));
        let classes: BTreeSet<_> = poly.singular.iter().map(|s| s.class).collect();
        let principal = classes.iter().any(|c| c.is_principal());
        let ok = classes.len() == h - 1 && !principal;
        pass &= ok;
        parts.push(format!("m={m}: {}/{}", classes.len(), h - 1));
    }
    // m = 5 against the brute-force search
    let ring = field(5).complex.ring;
    let brute = singular::brute_force_singular(ring, 30);
    let expected = vec![KElem::new(ring, rat(1, 2), rat(1, 2))];
    let library: Vec<KElem> = field(5)
        .poly
        .singular
        .iter()
        .map(|s| s.value.clone())
        .collect();
    let ok5 = brute == expected && library == expected;
    pass &= ok5;
    // the other class-number-two fields against the brute-force search
    let mut agree = true;
    for m in [6, 10, 13, 15] {
        let ring = field(m).complex.ring;
        let mut lib: Vec<KElem> = field(m)
            .poly
            .singular
            .iter()
            .map(|s| s.value.clone())
            .collect();
        lib.sort();
        agree &= singular::brute_force_singular(ring, 30) == lib;
    }
    pass &= agree;
    outcome(
        pass,
        format!(
            "classes/h-1: {}; m=5 singular set {{(1+sqrt(-5))/2}}: {ok5}; brute force agrees for 6,10,13,15: {agree}",
            parts.join(", ")
        ),
    )
}

fn eisenstein() -> Outcome {
    let mut pass = true;
    for h in 1..6 {
        for n in 0..6 {
            pass &= eisenstein_dimension(h, n) == if n == 0 { h - 1 } else { h };
        }
    }
    let mut inv_ok = true;
    let mut torus_ok = true;
    for m in all_fields() {
        let ring = field(m).complex.ring;
        let f = KField { ring };
        for n in 0..=4 {
            let inv = unipotent_invariants(&f, &[ring.one(), ring.omega()], n);
            let v = index(n, n, 0);
            inv_ok &= inv.cols == 1 && (0..inv.rows).all(|i| f.is_zero(inv.get(i, 0)) == (i != v));
            let t = torus_cohomology(
                &f,
                &GroupElement::translation(&ring.one()),
                &GroupElement::translation(&ring.omega()),
                n,
            );
            torus_ok &= t == Ok((1, 2, 1));
        }
        // singular cusp stabilizers
        for c in field(m).complex.cusp_orbits() {
            let g = &c.cusp.as_ref().unwrap().generators;
            for n in 0..=3 {
                torus_ok &= torus_cohomology(&f, &g[0], &g[1], n) == Ok((1, 2, 1));
                inv_ok &= bianchi::coefficients::fixed_space(&f, g, n).cols == 1;
            }
        }
    }
    pass &= inv_ok && torus_ok;
    outcome(
        pass,
        format!("h-delta(n,0) for h<6, n<6; unipotent invariants = <x^n (x) y^n>: {inv_ok}; torus (1,2,1) incl. singular cusps, n<=4: {torus_ok}"),
    )
}

fn cuspidal() -> Outcome {
    let table = lift_table();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [2, 19] {
        let c = &field(m).complex;
        let mut row = Vec::new();
        for n in 0..=10 {
            let lift = table.get(m, n).expect("lift table entry");
            let s = modp_sweep(c, n, 200, Some(lift), true).unwrap();
            let exact = s.report.cuspidal_exact();
            let ok = s.report.certified && exact == Some(lift.lower);
            pass &= ok;
            row.push(match exact {
                Some(d) if ok => format!("{d}"),
                Some(d) => format!("{d}!={}", lift.lower),
                None => format!("[{},{}]", s.report.cuspidal_lower, s.report.cuspidal_upper),
            });
        }
        parts.push(format!("m={m} n=0..10: {}", row.join(" ")));
    }
    let mut excess = |m: i64, n: usize, k_fallback: bool| -> Option<i64> {
        let lift = table.get(m, n).unwrap();
        let s = modp_sweep(&field(m).complex, n, 200, Some(lift), k_fallback).unwrap();
        let how = match s.certification {
            Certification::LiftMatch { p } => format!("p={p}"),
            Certification::KRational => "K".into(),
            Certification::Uncertified => "mod-p bound".into(),
        };
        let e = s.report.cuspidal_upper as i64 - lift.lower as i64;
        parts.push(format!(
            "({m},{n}): excess {}{e} [{how}]",
            if s.report.certified { "" } else { "<=" }
        ));
        s.report.certified.then_some(e)
    };
    let claimed = [excess(7, 10, true), excess(11, 12, true)];
    pass &= claimed.iter().all(|e| *e == Some(2));
    // certified over K by `excess_is_certified_over_k` in tests/cohomology.rs
    excess(7, 12, false);
    excess(11, 10, false);
    parts.push(stretch());
    outcome(pass, parts.join("; "))
}

/// Non-gating: the large-discriminant exceptions, only with `BIANCHI_STRETCH` set.
fn stretch() -> String {
    if std::env::var_os("BIANCHI_STRETCH").is_none() {
        return "stretch (91,6),(643,0) not run (set BIANCHI_STRETCH=1)".into();
    }
    let mut out = Vec::new();
    for (m, n) in [(91, 6), (643, 0)] {
        let poly = compute_polyhedron(&field_context(m).unwrap()).unwrap();
        let c = build_complex(&poly).unwrap();
        let s = modp_sweep(&c, n, 200, None, false).unwrap();
        out.push(format!(
            "({m},{n}): cuspidal in [{}, {}], conjecture <= {}",
            s.report.cuspidal_lower, s.report.cuspidal_upper, s.report.conjecture_cuspidal_upper
        ));
    }
    format!("stretch {}", out.join(", "))
}

fn linear_algebra() -> Outcome {
    let mut parts = Vec::new();
    // d1 d0 = 0: on the cells, and on every built complex over F_p and K
    let mut composition = true;
    let mut built = 0;
    for m in all_fields() {
        let c = &field(m).complex;
        composition &= c.check_boundary_squared().is_ok();
        let p = good_primes(c.ring, 200)
            .into_iter()
            .find(|&p| splitting(c.ring, p) == Splitting::Split)
            .unwrap();
        let f = Fp::new(c.ring, p, false).unwrap();
        for n in 0..=4 {
            composition &= EquivariantComplex::build(&f, c, n)
                .unwrap()
                .composition_vanishes();
            built += 1;
        }
        let k = KField { ring: c.ring };
        composition &= EquivariantComplex::build(&k, c, 1)
            .unwrap()
            .composition_vanishes();
        built += 1;
    }
    parts.push(format!("d1.d0=0 on {built} complexes: {composition}"));

    // averaging projectors
    let mut idempotent = true;
    let mut projectors = 0;
    for m in all_fields() {
        let c = &field(m).complex;
        let p = good_primes(c.ring, 200)
            .into_iter()
            .find(|&p| splitting(c.ring, p) == Splitting::Split)
            .unwrap();
        let f = Fp::new(c.ring, p, false).unwrap();
        for cells in &c.cells {
            for cell in cells {
                if let Some(st) = &cell.stabilizer {
                    for n in [1, 3] {
                        let inv = invariants(&f, st, n).unwrap();
                        idempotent &=
                            linalg::mul(&f, &inv.projector, &inv.projector) == inv.projector;
                        projectors += 1;
                    }
                }
            }
        }
    }
    parts.push(format!("{projectors} projectors idempotent: {idempotent}"));

    // multiplicativity on random pairs
    let mut rng = StdRng::seed_from_u64(500);
    let mut multiplicative = true;
    for _ in 0..500 {
        let m = all_fields()[rng.gen_range(0..all_fields().len())];
        let c = &field(m).complex;
        let mut pool: Vec<GroupElement> = c
            .cells
            .iter()
            .flatten()
            .flat_map(|cell| cell.boundary.iter().map(|t| t.element.clone()))
            .collect();
        pool.push(GroupElement::translation(&c.ring.omega()));
        let word = |rng: &mut StdRng| {
            let mut g = GroupElement::identity(c.ring);
            for _ in 0..rng.gen_range(1..4) {
                g = &g * &pool[rng.gen_range(0..pool.len())];
            }
            g
        };
        let (g, h) = (word(&mut rng), word(&mut rng));
        let n = rng.gen_range(0..4);
        let w = (n, rng.gen_range(0..4));
        let f = KField { ring: c.ring };
        let lhs = action_matrix(&f, &(&g * &h), w);
        let rhs = linalg::mul(&f, &action_matrix(&f, &g, w), &action_matrix(&f, &h, w));
        multiplicative &= lhs == rhs;
    }
    parts.push(format!(
        "action_matrix multiplicative on 500 random pairs over K: {multiplicative}"
    ));

    // universal coefficients
    let mut uc = true;
    let mut runs = Vec::new();
    for (m, n) in [(2, 2), (2, 3), (7, 2), (11, 3), (19, 2), (5, 2), (15, 1)] {
        let c = &field(m).complex;
        let (k, _) = k_report(c, n).unwrap();
        let mut equal = 0;
        let mut ok = k.certified;
        let primes = good_primes(c.ring, 200);
        for &p in &primes {
            let r = modp_report(c, n, p).unwrap();
            let ge = r.e2.iter().zip(&k.e2).all(|(a, b)| a >= b) && r.h2_upper >= k.h2_upper;
            ok &= ge;
            if r.e2 == k.e2 && r.cusps == k.cusps {
                equal += 1;
            }
        }
        ok &= equal > 0;
        uc &= ok;
        runs.push(format!("({m},{n}) {equal}/{} equal", primes.len()));
    }
    parts.push(format!(
        "mod-p >= K for good p<=200: {uc} [{}]",
        runs.join(", ")
    ));
    outcome(
        composition && idempotent && multiplicative && uc,
        parts.join("; "),
    )
}

fn trivial_coefficients() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in all_fields() {
        let c = &field(m).complex;
        let f = KField { ring: c.ring };
        let ss = h2_dimension(&f, c, 0).unwrap().e2;
        let q = quotient_cohomology(&f, c).unwrap();
        pass &= ss == q;
        parts.push(format!("m={m} {:?}", q));
    }
    outcome(pass, format!("E2 = H*(X/Γ): {}", parts.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "bound for class number one", bound_class_one),
        (2, "bound for class number two", bound_class_two),
        (3, "termination certificate", termination_certificate),
        (4, "singular-cusp census", singular_census),
        (5, "Eisenstein formula", eisenstein),
        (6, "cuspidal dimensions", cuspidal),
        (7, "linear-algebra invariants", linear_algebra),
        (8, "trivial coefficients", trivial_coefficients),
    ];
    let mut failing = Vec::new();
    let mut lines = Vec::new();
    for (id, name, run) in criteria {
        let t = std::time::Instant::now();
        let o = run();
        if !o.pass {
            failing.push(id);
        }
        let line = format!(
            "[{}] {id} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        // written past the test harness capture so the lines always show
        let _ = writeln!(std::io::stdout().lock(), "{line}");
        lines.push(line);
    }
    assert_eq!(
        failing,
        KNOWN_FAILING,
        "failing criteria changed:\n{}",
        lines.join("\n")
    );
}
