//! Dimensions over `K` from reductions modulo good primes.
//!
//! Ranks can only drop modulo `p`, so every mod-`p` dimension bounds the
//! `K`-dimension from above. Base-change lifts give a lower bound for the
//! cuspidal part; once an upper bound meets it the dimension is known.
//! Otherwise the ranks are certified over `K` directly.

use super::{
    h2_dimension, k_rational_rank, report_from_ranks, CohomologyError, DimensionReport, KRanks,
};
use crate::cellcomplex::FloegeComplex;
use crate::coefficients::{good_primes, splitting, FieldKind, Fp, Fp2, Splitting};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Dimension of the base-change lifts in one weight, as an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftBounds {
    pub lower: usize,
    pub upper: usize,
}

/// Lift bounds keyed by `"m,n"`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTable(pub BTreeMap<String, LiftEntry>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftEntry {
    pub lower: usize,
    pub upper: usize,
    /// How the value was obtained.
    #[serde(default)]
    pub source: String,
}

impl LiftTable {
    pub fn key(m: i64, n: usize) -> String {
        format!("{m},{n}")
    }

    pub fn get(&self, m: i64, n: usize) -> Option<LiftBounds> {
        self.0.get(&Self::key(m, n)).map(|e| LiftBounds {
            lower: e.lower,
            upper: e.upper,
        })
    }

    pub fn insert(&mut self, m: i64, n: usize, value: usize, source: &str) {
        self.0.insert(
            Self::key(m, n),
            LiftEntry {
                lower: value,
                upper: value,
                source: source.to_string(),
            },
        );
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum Certification {
    /// A mod-`p` upper bound equals the lift lower bound plus the Eisenstein part.
    LiftMatch {
        p: u64,
    },
    /// Ranks proven over `K`.
    KRational,
    Uncertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    /// Reports modulo each prime tried, ascending.
    pub steps: Vec<DimensionReport>,
    /// The `K`-rational report: exact when certified, otherwise bounds.
    pub report: DimensionReport,
    pub certification: Certification,
    pub k_ranks: Option<KRanks>,
}

/// The report modulo a good prime `p` (a degree-one prime when `p` splits).
pub fn modp_report(
    complex: &FloegeComplex,
    n: usize,
    p: u64,
) -> Result<DimensionReport, CohomologyError> {
    let ring = complex.ring;
    let bad = |e| CohomologyError::BadPrime(p, e);
    match splitting(ring, p) {
        Splitting::Split => h2_dimension(&Fp::new(ring, p, false).map_err(bad)?, complex, n),
        _ => h2_dimension(&Fp2::new(ring, p).map_err(bad)?, complex, n),
    }
}

/// The report over `K` from certified ranks. Uncertified ranks enter through
/// their bounds, which keeps `h2_lower <= dim <= h2_upper`.
pub fn k_report(
    complex: &FloegeComplex,
    n: usize,
) -> Result<(DimensionReport, KRanks), CohomologyError> {
    let k = k_rational_rank(complex, n)?;
    let certified = k.d0.exact().is_some() && k.d1.exact().is_some();
    let mut report = report_from_ranks(
        complex,
        n,
        FieldKind::KRational,
        k.e1,
        [k.d0.lower, k.d1.lower],
        k.cusps.clone(),
        certified,
    )?;
    if !certified {
        let low = report_from_ranks(
            complex,
            n,
            FieldKind::KRational,
            k.e1,
            [k.d0.upper, k.d1.upper],
            k.cusps.clone(),
            false,
        )?;
        report.h2_lower = report.h2_lower.min(low.h2_lower);
        report.cuspidal_lower = report.cuspidal_lower.min(low.cuspidal_lower);
    }
    Ok((report, k))
}

/// Sweeps good primes up to `prime_cap` in ascending order. With lift bounds
/// the sweep stops at the first prime whose upper bound meets them; without a
/// match (or without lifts) the ranks are certified over `K` when `k_fallback`.
pub fn modp_sweep(
    complex: &FloegeComplex,
    n: usize,
    prime_cap: u64,
    lifts: Option<LiftBounds>,
    k_fallback: bool,
) -> Result<SweepResult, CohomologyError> {
    let mut steps: Vec<DimensionReport> = Vec::new();
    for p in good_primes(complex.ring, prime_cap) {
        let r = modp_report(complex, n, p)?;
        let matched = lifts.is_some_and(|l| r.h2_upper == l.lower + r.eisenstein);
        steps.push(r);
        if matched {
            let mut report = steps.last().expect("pushed").clone();
            report.field = FieldKind::KRational;
            report.h2_lower = report.h2_upper;
            report.cuspidal_lower = report.cuspidal_upper;
            report.conjecture_cuspidal_upper = report.cuspidal_upper;
            report.certified = true;
            return Ok(SweepResult {
                steps,
                report,
                certification: Certification::LiftMatch { p },
                k_ranks: None,
            });
        }
    }
    if k_fallback {
        let (mut report, k) = k_report(complex, n)?;
        if report.certified {
            for s in &steps {
                if s.h2_upper < report.h2_upper {
                    let (FieldKind::Prime { p } | FieldKind::Quadratic { p }) = s.field else {
                        continue;
                    };
                    return Err(CohomologyError::UniversalCoefficients {
                        p,
                        modp: s.h2_upper,
                        k: report.h2_upper,
                    });
                }
            }
        }
        if let Some(l) = lifts {
            report.cuspidal_lower = report.cuspidal_lower.max(l.lower);
        }
        let certification = if report.certified {
            Certification::KRational
        } else {
            Certification::Uncertified
        };
        return Ok(SweepResult {
            steps,
            report,
            certification,
            k_ranks: Some(k),
        });
    }
    // bounds only: the smallest mod-p upper bound and the lift lower bound
    let best = steps
        .iter()
        .min_by_key(|r| r.h2_upper)
        .cloned()
        .ok_or(CohomologyError::NoPrimes(prime_cap))?;
    let mut report = best;
    report.field = FieldKind::KRational;
    report.certified = false;
    report.h2_lower = lifts
        .map_or(0, |l| l.lower + report.eisenstein)
        .min(report.h2_upper);
    report.cuspidal_lower = report.h2_lower - report.eisenstein.min(report.h2_lower);
    Ok(SweepResult {
        steps,
        report,
        certification: Certification::Uncertified,
        k_ranks: None,
    })
}
