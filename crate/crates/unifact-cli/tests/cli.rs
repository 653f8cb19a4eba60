//! End-to-end CLI tests: the exit-code contract, the spec'd examples, and
//! the full `verify --suite all` run over the standard instance set.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_unifact"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst.json");
    let res = run(&["generate", "--sites", "2,2", "--seed", "7", "--out", path_str(&out)]);
    assert!(res.status.success(), "{res:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["sites"], serde_json::json!([2, 2]));
    assert_eq!(v["unit_mode"], "product");
    assert_eq!(v["seed"], 7);
}

#[test]
fn generate_random_multiplicative_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst.json");
    let res = run(&[
        "generate",
        "--sites",
        "2,3",
        "--unit",
        "random-multiplicative",
        "--seed",
        "7",
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success(), "{res:?}");
    // and the generated instance passes the unital suite
    let res = run(&["verify", path_str(&out), "--suite", "unital"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn generate_rejects_degenerate_site() {
    let res = run(&["generate", "--sites", "2,1"]);
    assert_eq!(res.status.code(), Some(2), "{res:?}");
}

#[test]
fn verify_rejects_unreadable_and_invalid() {
    let res = run(&["verify", "/nonexistent/instance.json"]);
    assert_eq!(res.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"sites\": [2, 2], \"seed\": 1, \"bogus\": true}").unwrap();
    let res = run(&["verify", path_str(&bad)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn verify_bell_unit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bell.json");
    let s = 0.5f64.sqrt();
    let body = serde_json::json!({
        "sites": [2, 2],
        "unit_mode": "explicit",
        "unit": {"rows": 4, "cols": 1, "data": [[s, 0.0], [0.0, 0.0], [0.0, 0.0], [s, 0.0]]},
        "seed": 3
    });
    std::fs::write(&inst, serde_json::to_string(&body).unwrap()).unwrap();
    let res = run(&["verify", path_str(&inst), "--suite", "unital"]);
    assert_eq!(res.status.code(), Some(3), "{res:?}");
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("independence"), "names the failing certification: {err}");
}

#[test]
fn verify_lemmas_is_instance_independent() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, "{\"sites\": [2], \"seed\": 9}").unwrap();
    let res = run(&["verify", path_str(&inst), "--suite", "lemmas"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn verify_accepts_tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, "{\"sites\": [2, 2], \"unit_mode\": \"product\", \"seed\": 1}")
        .unwrap();
    let res = run(&["verify", path_str(&inst), "--suite", "factorization", "--tol", "10"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    // non-positive and absurd factors are input errors
    let res = run(&["verify", path_str(&inst), "--tol", "0"]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["verify", path_str(&inst), "--tol", "1e12"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn report_types_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, "{\"sites\": [2, 2], \"unit_mode\": \"product\", \"seed\": 1}")
        .unwrap();
    let report = dir.path().join("report.json");
    let res = run(&["verify", path_str(&inst), "--suite", "algebra", "--out", path_str(&report)]);
    assert!(res.status.success());
    // the report parses back through the same schema
    let text = std::fs::read_to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["wall_time"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["versions"]["unifact"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["suites"][0]["name"], "algebra");
}

#[test]
fn classify_discovers_unit_and_reports_legs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, "{\"sites\": [2, 2], \"seed\": 11}").unwrap();
    let out = dir.path().join("cls.json");
    let res = run(&["classify", path_str(&inst), "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["fock"]["legs"], serde_json::json!([1, 1]));
}

#[test]
fn classify_single_site_with_product_unit() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, "{\"sites\": [3], \"unit_mode\": \"product\", \"seed\": 2}").unwrap();
    let out = dir.path().join("cls.json");
    let res = run(&["classify", path_str(&inst), "--out", path_str(&out)]);
    assert!(res.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["fock"]["legs"], serde_json::json!([2]));
}

#[test]
fn classify_is_conjugation_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.json");
    let scrambled = dir.path().join("scrambled.json");
    std::fs::write(&plain, "{\"sites\": [2, 3], \"seed\": 4}").unwrap();
    std::fs::write(&scrambled, "{\"sites\": [2, 3], \"conjugate_seed\": 99, \"seed\": 4}")
        .unwrap();
    let mut legs = Vec::new();
    for inst in [&plain, &scrambled] {
        let out = dir.path().join("cls.json");
        let res = run(&["classify", path_str(inst), "--out", path_str(&out)]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        legs.push(v["fock"]["legs"].clone());
    }
    assert_eq!(legs[0], legs[1]);
}

/// Criterion 10: `verify --suite all` over the standard instance set
/// finishes within the budget, exits 0, and reports deterministically.
#[test]
fn criterion_10_full_cli_run() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    for (i, sites) in ["2,2", "2,3", "3,3", "2,2,2", "2,2,3"].iter().enumerate() {
        let inst = dir.path().join(format!("inst{i}.json"));
        let res = run(&[
            "generate",
            "--sites",
            sites,
            "--seed",
            &i.to_string(),
            "--out",
            path_str(&inst),
        ]);
        assert!(res.status.success(), "generate {sites}");
        let report = dir.path().join(format!("report{i}.json"));
        let res =
            run(&["verify", path_str(&inst), "--suite", "all", "--out", path_str(&report)]);
        assert!(
            res.status.success(),
            "verify {sites}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        let all_pass = v["suites"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|s| s["checks"].as_array().unwrap())
            .all(|c| c["pass"].as_bool().unwrap());
        assert!(all_pass, "all laws pass on {sites}");
    }
    // determinism: re-verify the first instance, compare modulo wall_time
    let inst = dir.path().join("inst0.json");
    let rerun = dir.path().join("rerun.json");
    let res = run(&["verify", path_str(&inst), "--suite", "all", "--out", path_str(&rerun)]);
    assert!(res.status.success());
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report0.json")).unwrap())
            .unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rerun).unwrap()).unwrap();
    a.as_object_mut().unwrap().remove("wall_time");
    b.as_object_mut().unwrap().remove("wall_time");
    assert_eq!(a, b, "reports are byte-identical except wall_time");

    let elapsed = started.elapsed();
    println!(
        "criterion 10 (full CLI run): PASS (standard set verified in {:.1?}, budget 300s)",
        elapsed
    );
    assert!(elapsed.as_secs() < 300, "within the five-minute budget");
}
