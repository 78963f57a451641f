mod checks;
mod export;

use anyhow::{bail, Context, Result};
use bianchi::arith::field_context;
use bianchi::cellcomplex::{build_complex, FloegeComplex};
use bianchi::cohomology::{modp_sweep, Certification, LiftTable, SweepResult};
use bianchi::swan::{compute_polyhedron, Polyhedron};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Worker count for the thread pool; defaults to the number of CPUs.
const WORKERS_ENV: &str = "BIANCHI_WORKERS";

#[derive(Parser)]
#[command(
    name = "bianchi",
    version,
    about = "Exact cohomology of Bianchi groups SL_2(O_-m)"
)]
struct Cli {
    /// Parent of the run directories.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Field {
    /// Squarefree m > 0 with m not 1 or 3.
    #[arg(short, long, value_parser = parse_field)]
    m: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental polyhedron, its termination certificate and the quotient complex.
    Polyhedron {
        #[command(flatten)]
        field: Field,
        /// Skip the OFF mesh.
        #[arg(long)]
        no_off: bool,
        /// Skip the quotient-complex dump.
        #[arg(long)]
        no_quotient: bool,
    },
    /// Dimensions of H^2 and of its cuspidal part for a range of weights.
    Cohomology {
        #[command(flatten)]
        field: Field,
        /// Weights as `a..b` (inclusive) or a single `n`.
        #[arg(short, value_parser = parse_range)]
        n: RangeInclusive<usize>,
        /// Largest prime in the mod-p sweep.
        #[arg(long, default_value_t = 200)]
        primes: u64,
        /// Lift lower bounds, JSON keyed by "m,n".
        #[arg(long)]
        lifts: Option<PathBuf>,
        /// Bounds from the mod-p sweep only; skips the rank certification over K.
        #[arg(long)]
        modp_only: bool,
    },
    /// Runs the invariant suite and exits nonzero on any failure.
    Verify {
        #[command(flatten)]
        field: Field,
        #[arg(long, default_value_t = 200)]
        primes: u64,
        /// Flips one incidence sign before checking (mutation test).
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
}

fn parse_field(s: &str) -> Result<i64, String> {
    let m: i64 = s.parse().map_err(|e| format!("{e}"))?;
    field_context(m).map_err(|e| e.to_string())?;
    Ok(m)
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (parse(s)?, parse(s)?),
    };
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

/// A run directory and the files written to it.
struct Run {
    dir: PathBuf,
    files: Vec<(String, usize)>,
}

impl Run {
    fn new(out: &Path, name: &str) -> Result<Self> {
        let dir = out.join(name);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Run {
            dir,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents).with_context(|| format!("writing {name}"))?;
        self.files.push((name.to_string(), contents.len()));
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    fn finish(mut self, command: Value, ok: bool) -> Result<PathBuf> {
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|(n, b)| json!({ "name": n, "bytes": b }))
            .collect();
        let manifest = json!({
            "tool": "bianchi",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "status": if ok { "ok" } else { "failed" },
            "files": files,
        });
        self.write_json("manifest.json", &manifest)?;
        Ok(self.dir)
    }
}

fn build(m: i64) -> Result<(Polyhedron, FloegeComplex)> {
    let ctx = field_context(m)?;
    let poly = compute_polyhedron(&ctx)?;
    let complex = build_complex(&poly)?;
    Ok((poly, complex))
}

fn polyhedron(out: &Path, m: i64, off: bool, quotient: bool) -> Result<bool> {
    let (poly, complex) = build(m)?;
    let points = checks::lattice_points(&poly, 32);
    let missed = checks::uncovered(&poly, &points);
    let mut report = export::polyhedron(&poly, points.len());
    report["certificate"]["lattice_points_uncovered"] = json!(missed);
    let holds = report["certificate"]["holds"] == json!(true) && missed == 0;
    report["certificate"]["holds"] = json!(holds);

    let mut run = Run::new(out, &format!("polyhedron-m{m}"))?;
    run.write_json("polyhedron.json", &report)?;
    if off {
        run.write("polyhedron.off", &complex.off_mesh())?;
    }
    if quotient {
        run.write_json("quotient.json", &export::quotient(&complex))?;
    }
    println!(
        "m={m}: {} hemispheres, {} vertices, max N(mu) = {}, certificate {}",
        poly.list.entries.len(),
        poly.vertices.len(),
        report["max_mu_norm"],
        if holds { "holds" } else { "FAILS" }
    );
    let dir = run.finish(
        json!({ "polyhedron": { "m": m, "off": off, "quotient": quotient } }),
        holds,
    )?;
    println!("{}", dir.display());
    Ok(holds)
}

#[derive(Serialize)]
struct Row {
    n: usize,
    e2: [usize; 3],
    h2_lower: usize,
    h2_upper: usize,
    eisenstein: usize,
    cuspidal_lower: usize,
    cuspidal_upper: usize,
    conjecture_cuspidal: usize,
    status: String,
}

fn status(s: &SweepResult) -> String {
    match s.certification {
        Certification::LiftMatch { p } => format!("certified (lift match mod {p})"),
        Certification::KRational if s.report.h2_exact().is_some() => "certified (K)".into(),
        Certification::KRational => {
            "uncertified (ranks exact over K, interval from the cusps)".into()
        }
        Certification::Uncertified => "uncertified (mod-p bounds)".into(),
    }
}

fn cohomology(
    out: &Path,
    m: i64,
    weights: RangeInclusive<usize>,
    primes: u64,
    lifts: Option<&Path>,
    exact: bool,
) -> Result<bool> {
    let table: Option<LiftTable> = match lifts {
        Some(p) => Some(serde_json::from_str(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?),
        None => None,
    };
    let (_, complex) = build(m)?;
    let mut run = Run::new(
        out,
        &format!("cohomology-m{m}-n{}-{}", weights.start(), weights.end()),
    )?;
    let mut rows = Vec::new();
    println!("m={m}  n  E2            H2        eis  cuspidal  conjecture  status");
    for n in weights.clone() {
        let bounds = table.as_ref().and_then(|t| t.get(m, n));
        let s = modp_sweep(&complex, n, primes, bounds, exact)?;
        let r = &s.report;
        let row = Row {
            n,
            e2: r.e2,
            h2_lower: r.h2_lower,
            h2_upper: r.h2_upper,
            eisenstein: r.eisenstein,
            cuspidal_lower: r.cuspidal_lower,
            cuspidal_upper: r.cuspidal_upper,
            conjecture_cuspidal: r.conjecture_cuspidal_upper,
            status: status(&s),
        };
        println!(
            "{:>6} {:<13} {:<9} {:<4} {:<9} {:<11} {}",
            n,
            format!("{:?}", r.e2),
            interval(r.h2_lower, r.h2_upper),
            r.eisenstein,
            interval(r.cuspidal_lower, r.cuspidal_upper),
            r.conjecture_cuspidal_upper,
            row.status
        );
        run.write_json(&format!("report-n{n}.json"), &s)?;
        rows.push(row);
    }
    run.write_json("table.json", &rows)?;
    let command = json!({ "cohomology": {
        "m": m,
        "n": [weights.start(), weights.end()],
        "primes": primes,
        "lifts": lifts.map(|p| p.display().to_string()),
        "modp_only": !exact,
    }});
    let dir = run.finish(command, true)?;
    println!("{}", dir.display());
    Ok(true)
}

fn interval(a: usize, b: usize) -> String {
    if a == b {
        a.to_string()
    } else {
        format!("[{a},{b}]")
    }
}

fn verify(out: &Path, m: i64, primes: u64, flip: bool) -> Result<bool> {
    let (poly, mut complex) = build(m)?;
    if flip {
        let Some(edge) = complex.cells[1].iter_mut().find(|e| !e.boundary.is_empty()) else {
            bail!("no edge to mutate");
        };
        edge.boundary[0].sign = -edge.boundary[0].sign;
    }
    let results = checks::run(&poly, &complex, primes);
    let ok = results.iter().all(|c| c.pass);
    for c in &results {
        println!(
            "[{}] {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let mut run = Run::new(out, &format!("verify-m{m}"))?;
    run.write_json(
        "verify.json",
        &json!({ "m": m, "checks": results, "pass": ok }),
    )?;
    let dir = run.finish(
        json!({ "verify": { "m": m, "primes": primes, "inject_sign_flip": flip } }),
        ok,
    )?;
    println!("{}", dir.display());
    Ok(ok)
}

fn init_workers() -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.parse().with_context(|| format!("{WORKERS_ENV}={v}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_workers().and_then(|()| match cli.command {
        Command::Polyhedron {
            field,
            no_off,
            no_quotient,
        } => polyhedron(&cli.out, field.m, !no_off, !no_quotient),
        Command::Cohomology {
            field,
            n,
            primes,
            lifts,
            modp_only,
        } => cohomology(&cli.out, field.m, n, primes, lifts.as_deref(), !modp_only),
        Command::Verify {
            field,
            primes,
            inject_sign_flip,
        } => verify(&cli.out, field.m, primes, inject_sign_flip),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
