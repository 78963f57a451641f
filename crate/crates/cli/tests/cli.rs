use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bianchi(out: &Path, args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bianchi"));
    cmd.arg("--out").arg(out).args(args);
    if let Some(w) = workers {
        cmd.env("BIANCHI_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn lifts() -> String {
    format!("{}/../../data/lifts.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn polyhedron_writes_a_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bianchi(tmp.path(), &["polyhedron", "-m", "2"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("polyhedron-m2");
    let manifest = read_json(&dir.join("manifest.json"));
    let names: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["polyhedron.json", "polyhedron.off", "quotient.json"]
    );
    assert_eq!(manifest["status"], "ok");

    let poly = read_json(&dir.join("polyhedron.json"));
    assert_eq!(poly["max_mu_norm"], 1);
    assert_eq!(poly["mu_norm_bound"], "9/2");
    assert_eq!(poly["certificate"]["holds"], true);

    let off = std::fs::read_to_string(dir.join("polyhedron.off")).unwrap();
    assert!(off.starts_with("OFF\n# floating point rendering, not certified"));
    let quotient = read_json(&dir.join("quotient.json"));
    assert_eq!(quotient["orbit_counts"], serde_json::json!([3, 6, 3]));
}

#[test]
fn excluded_fields_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    for m in ["1", "3", "4", "-2"] {
        let o = bianchi(tmp.path(), &["polyhedron", "-m", m], None);
        assert_eq!(o.status.code(), Some(2), "m={m}");
    }
}

#[test]
fn outputs_do_not_depend_on_the_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(bianchi(a.path(), &["polyhedron", "-m", "19"], Some("1"))
        .status
        .success());
    assert!(bianchi(b.path(), &["polyhedron", "-m", "19"], Some("4"))
        .status
        .success());
    for f in [
        "polyhedron.json",
        "polyhedron.off",
        "quotient.json",
        "manifest.json",
    ] {
        let read = |d: &Path| std::fs::read(d.join("polyhedron-m19").join(f)).unwrap();
        assert_eq!(read(a.path()), read(b.path()), "{f}");
    }
}

#[test]
fn cohomology_without_lifts_is_uncertified() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bianchi(
        tmp.path(),
        &["cohomology", "-m", "2", "-n", "0..6", "--modp-only"],
        None,
    );
    assert!(o.status.success());
    let rows = read_json(&tmp.path().join("cohomology-m2-n0-6/table.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for r in rows {
        let n = r["n"].as_u64().unwrap();
        assert_eq!(r["eisenstein"], u64::from(n != 0));
        if r["cuspidal_lower"] != r["cuspidal_upper"] {
            assert!(r["status"].as_str().unwrap().starts_with("uncertified"));
        }
    }
    assert!(tmp
        .path()
        .join("cohomology-m2-n0-6/report-n3.json")
        .exists());
}

#[test]
fn cohomology_with_lifts_is_certified() {
    let tmp = tempfile::tempdir().unwrap();
    let table = lifts();
    let o = bianchi(
        tmp.path(),
        &["cohomology", "-m", "7", "-n", "0..4", "--lifts", &table],
        None,
    );
    assert!(o.status.success());
    let rows = read_json(&tmp.path().join("cohomology-m7-n0-4/table.json"));
    let cusp: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["cuspidal_upper"].as_u64().unwrap())
        .collect();
    assert_eq!(cusp, [0, 0, 0, 0, 1]);
    assert!(rows
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["status"].as_str().unwrap().starts_with("certified")));
}

#[test]
fn weight_two_has_no_cusp_forms_for_small_discriminants() {
    let tmp = tempfile::tempdir().unwrap();
    for m in ["2", "7", "11", "19"] {
        let o = bianchi(tmp.path(), &["cohomology", "-m", m, "-n", "0"], None);
        assert!(o.status.success());
        let rows = read_json(&tmp.path().join(format!("cohomology-m{m}-n0-0/table.json")));
        assert_eq!(rows[0]["cuspidal_upper"], 0, "m={m}");
        assert_eq!(rows[0]["cuspidal_lower"], 0, "m={m}");
    }
}

#[test]
fn class_number_two_intervals_have_width_at_most_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bianchi(tmp.path(), &["cohomology", "-m", "5", "-n", "0..2"], None);
    assert!(o.status.success());
    let rows = read_json(&tmp.path().join("cohomology-m5-n0-2/table.json"));
    for r in rows.as_array().unwrap() {
        let width = r["h2_upper"].as_u64().unwrap() - r["h2_lower"].as_u64().unwrap();
        assert!(width <= 2, "{r}");
    }
}

#[test]
fn verify_passes_and_detects_a_sign_flip() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bianchi(tmp.path(), &["verify", "-m", "2", "--primes", "60"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(&tmp.path().join("verify-m2/verify.json"));
    assert_eq!(report["pass"], true);

    let o = bianchi(
        tmp.path(),
        &["verify", "-m", "2", "--primes", "60", "--inject-sign-flip"],
        None,
    );
    assert!(!o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[FAIL] d1 d0 = 0"), "{stdout}");
    let manifest = read_json(&tmp.path().join("verify-m2/manifest.json"));
    assert_eq!(manifest["status"], "failed");
}
