//! JSON renderings of exact data: rationals as integers or `"num/den"` strings,
//! field elements as `{r, w}` in the basis `{1, omega}`.

use bianchi::arith::{rat, KElem, Rational};
use bianchi::cellcomplex::FloegeComplex;
use bianchi::report::rational_string;
use bianchi::swan::Polyhedron;
use serde_json::{json, Value};

pub fn rational(q: &Rational) -> Value {
    let s = rational_string(q);
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

pub fn kelem(z: &KElem) -> Value {
    json!({ "r": rational(&z.r()), "w": rational(&z.w()) })
}

/// The expected bound on `N(mu)` for class numbers one and two.
pub fn mu_norm_bound(m: i64, d: i64, h: usize) -> Option<Rational> {
    match h {
        1 => Some(rat(d + 1, 2)),
        2 if m % 4 == 3 => Some(rat(3 * d, 1)),
        2 => Some(rat(5 * 116 + 61, 116) * rat(d, 1)),
        _ => None,
    }
}

pub fn polyhedron(poly: &Polyhedron, lattice_points: usize) -> Value {
    let ctx = &poly.ctx;
    let d = -ctx.discriminant;
    let hemispheres: Vec<Value> = poly
        .list
        .entries
        .iter()
        .map(|h| {
            json!({
                "mu": kelem(h.mu()),
                "lambda": kelem(h.lambda()),
                "center": kelem(h.center()),
                "mu_norm": rational(&h.mu_norm()),
            })
        })
        .collect();
    let vertices: Vec<Value> = poly
        .vertices
        .iter()
        .map(|v| json!({ "z": kelem(&v.z), "height2": rational(&v.h2) }))
        .collect();
    let violations = poly.certificate_violations();
    json!({
        "m": ctx.m(),
        "discriminant": ctx.discriminant,
        "class_number": ctx.class_number,
        "hemispheres": hemispheres,
        "vertices": vertices,
        "singular": poly.singular,
        "max_mu_norm": rational(&poly.max_mu_norm()),
        "mu_norm_bound": mu_norm_bound(ctx.m(), d, ctx.class_number).map(|b| rational(&b)),
        "certificate": {
            "vertices_below_hemispheres": violations.len(),
            "lattice_points_checked": lattice_points,
            "holds": violations.is_empty(),
        },
    })
}

pub fn quotient(c: &FloegeComplex) -> Value {
    let cells: Vec<Vec<Value>> = c
        .cells
        .iter()
        .map(|cells| {
            cells
                .iter()
                .map(|cell| {
                    let boundary: Vec<Value> = cell
                        .boundary
                        .iter()
                        .map(|t| json!({ "face": t.face, "sign": t.sign, "element": t.element }))
                        .collect();
                    json!({
                        "stabilizer_order": cell.stabilizer_order(),
                        "cusp": cell.cusp,
                        "members": cell.members,
                        "boundary": boundary,
                    })
                })
                .collect()
        })
        .collect();
    let incidence: Vec<Value> = [1, 2]
        .iter()
        .map(|&d| c.quotient_incidence(d).map_or(Value::Null, |m| json!(m)))
        .collect();
    json!({
        "m": c.ring.m(),
        "class_number": c.class_number,
        "orbit_counts": c.orbit_counts(),
        "orbifold_euler_characteristic": rational(&c.orbifold_euler_characteristic()),
        "cells": cells,
        "quotient_incidence": incidence,
    })
}
