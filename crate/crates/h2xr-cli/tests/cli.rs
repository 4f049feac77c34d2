//! End-to-end tests of the binary: envelope shape and determinism, the
//! exit-code contract, file outputs, and the output-directory variable.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_h2xr");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("H2XR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn write_pair(path: &Path) {
    std::fs::write(
        path,
        r#"{"upper": [{"k": 0, "a_k": 0.5}], "lower": [{"k": 0, "a_k": -0.5}]}"#,
    )
    .unwrap();
}

#[test]
fn envelope_is_deterministic_outside_timing() {
    let mut first = stdout_json(&run(&["catenoid", "--kappa", "0.75"]));
    let mut second = stdout_json(&run(&["catenoid", "--kappa", "0.75"]));
    for doc in [&mut first, &mut second] {
        let top = doc.as_object_mut().unwrap();
        for key in ["command", "config", "results", "timing", "version"] {
            assert!(top.contains_key(key), "envelope lacks {key}");
        }
        top.remove("timing");
    }
    assert_eq!(first, second);
}

#[test]
fn catenoid_profile_starts_the_waist_at_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let out = run(&["catenoid", "--kappa", "0.75", "--out", csv.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["results"]["neck_radius"]["value"], 0.5);

    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,r,r_prime\n"));
    // The odd default node count places a sample exactly on the waist.
    assert!(
        text.contains("\n0.000000000000e0,5.000000000000e-1,"),
        "waist row r(0) = 0.5 missing"
    );
}

#[test]
fn exit_codes_distinguish_usage_domain_and_numerics() {
    // Flag-level misuse.
    assert_eq!(run(&["catenoid"]).status.code(), Some(1));
    // Mathematically inadmissible input.
    assert_eq!(run(&["catenoid", "--kappa=-1"]).status.code(), Some(2));
    // A residual target below the attainable floor: the solver refuses.
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("outer.json");
    std::fs::write(&curve, r#"[{"k": 0, "a_k": 0.4}, {"k": 1, "a_k": 0.2}]"#).unwrap();
    let refused = run(&[
        "graph",
        "--outer",
        curve.to_str().unwrap(),
        "--rings",
        "48",
        "--sectors",
        "48",
        "--tol",
        "1e-16",
    ]);
    assert_eq!(refused.status.code(), Some(3));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn gate_emits_the_verdict_for_a_constant_pair() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    write_pair(&pair);
    let doc = stdout_json(&run(&["gate", "--pair", pair.to_str().unwrap()]));
    assert_eq!(doc["results"]["verdict"]["kind"], "gate_passed");
    assert_eq!(doc["results"]["verdict"]["catenoid_half_height"], 0.5);
}

#[test]
fn mesh_export_writes_consistent_obj_and_ply() {
    let dir = tempfile::tempdir().unwrap();
    let obj_path = dir.path().join("cat.obj");
    let ply_path = dir.path().join("cat.ply");
    for path in [&obj_path, &ply_path] {
        let out = run(&[
            "catenoid",
            "--kappa",
            "1",
            "--nodes",
            "33",
            "--sectors",
            "24",
            "--mesh",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }

    let obj = std::fs::read_to_string(&obj_path).unwrap();
    let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
    let faces = obj.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(vertices, 33 * 24);
    assert_eq!(faces, 2 * 32 * 24);

    let ply = std::fs::read_to_string(&ply_path).unwrap();
    assert!(ply.starts_with("ply\nformat ascii 1.0\n"));
    assert!(ply.contains(&format!("element vertex {vertices}")));
    assert!(ply.contains(&format!("element face {faces}")));
}

#[test]
fn out_dir_variable_resolves_relative_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["catenoid", "--kappa", "1", "--out", "prof.csv"])
        .env("H2XR_OUT_DIR", dir.path())
        .current_dir(std::env::temp_dir())
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(dir.path().join("prof.csv").is_file());
}

#[test]
fn single_verification_checks_run_by_name() {
    let ok = run(&["verify-all", "--check", "catenoid-neck-radius"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.contains("PASS  catenoid-neck-radius"));
    assert!(text.contains("1/1 checks passed"));

    let unknown = run(&["verify-all", "--check", "no-such-check"]);
    assert_eq!(unknown.status.code(), Some(1));

    let json = run(&["verify-all", "--check", "boundary-gates", "--json"]);
    let doc = stdout_json(&json);
    assert_eq!(doc["results"]["all_passed"], true);
    assert_eq!(doc["results"]["checks"][0]["name"], "boundary-gates");
    assert!(doc["timing"]["per_check"]["boundary-gates"].is_number());
}

#[test]
fn report_file_duplicates_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["flux", "--kappa", "2", "--report", report.to_str().unwrap()]);
    let printed = stdout_json(&out);
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(printed, written);
}
