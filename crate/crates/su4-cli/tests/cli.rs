use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn profile() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("profiles/calibrated_noise.json")
}

fn su4c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su4c")).args(args).env_remove("SU4C_TOLERANCE").output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = su4c(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identity_compiles_and_lowers() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let out = su4c(&["compile", "--input", s(&data("identity.json")), "--out", s(&params)]);
    assert!(out.status.success());
    let p: Value = serde_json::from_slice(&std::fs::read(&params).unwrap()).unwrap();
    assert_eq!(p["meta"]["verify"]["pass"], true);
    let pulses = json_ok(&["lower", "--params", s(&params)]);
    assert_eq!(pulses["count"], 35);
    assert_eq!(pulses["g_count"], 3);
}

#[test]
fn printed_matrix_needs_unitarity_tolerance() {
    let u = data("U.json");
    assert_eq!(code(&su4c(&["compile", "--input", s(&u)])), 3);

    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let out = su4c(&["compile", "--input", s(&u), "--unitarity-tolerance", "5e-3", "--out", s(&params)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p: Value = serde_json::from_slice(&std::fs::read(&params).unwrap()).unwrap();
    assert!(p["meta"]["verify"]["distance"].as_f64().unwrap() < 1e-6);
    assert!(p["meta"]["input_projection_distance"].as_f64().unwrap() < 1e-3);

    let v = json_ok(&["verify", "--unitary", s(&u), "--params", s(&params), "--unitarity-tolerance", "5e-3"]);
    assert_eq!(v["verify"]["pass"], true);
}

#[test]
fn tolerance_env_var_is_honoured() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_su4c"))
            .args(["compile", "--input", s(&data("U.json"))])
            .env("SU4C_TOLERANCE", env)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("unitarity=5e-3")), 0);
    assert_eq!(code(&run("unitarity=1e-9")), 3);
    assert_eq!(code(&run("bogus=1")), 2);
}

#[test]
fn verify_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    assert!(su4c(&["compile", "--input", s(&data("identity.json")), "--out", s(&params)]).status.success());
    let out = su4c(&["verify", "--unitary", s(&data("U.json")), "--params", s(&params), "--unitarity-tolerance", "5e-3"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&su4c(&["compile", "--input", s(&bad)])), 2);
    std::fs::write(&bad, "[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]").unwrap();
    assert_eq!(code(&su4c(&["compile", "--input", s(&bad)])), 2);
    let noise = dir.path().join("noise.json");
    std::fs::write(&noise, r#"{"depolarizing_per_g": 1.5}"#).unwrap();
    let out = su4c(&["benchmark", "--n", "16", "--exact", "--noise", s(&noise)]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&su4c(&["benchmark", "--n", "15", "--exact"])), 2);
}

#[test]
fn missing_file_exits_1() {
    assert_eq!(code(&su4c(&["compile", "--input", "/nonexistent/u.json"])), 1);
}

#[test]
fn non_unitary_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, "[[[2,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]")
        .unwrap();
    assert_eq!(code(&su4c(&["compile", "--input", s(&m)])), 3);
}

#[test]
fn simulate_then_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("r.json");
    let out = su4c(&[
        "simulate", "--unitary", s(&data("identity.json")), "--input", "up,up", "--shots", "1000", "--seed", "4", "--out",
        s(&recs),
    ]);
    assert!(out.status.success());
    let bundle: Value = serde_json::from_slice(&std::fs::read(&recs).unwrap()).unwrap();
    assert_eq!(bundle["records"].as_array().unwrap().len(), 9);
    assert_eq!(bundle["metadata"]["input"], serde_json::json!(["up", "up"]));
    let rho = json_ok(&["reconstruct", "--records", s(&recs)]);
    let r00 = rho["rho"][0][0][0].as_f64().unwrap();
    assert!(r00 > 0.97, "{r00}");
}

#[test]
fn noiseless_exact_benchmark_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("b.csv");
    let r = json_ok(&["benchmark", "--n", "160", "--seed", "2", "--exact", "--shots", "1", "--method", "linear", "--csv", s(&csv_path)]);
    for op in r["operations"].as_array().unwrap() {
        assert!((op["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.records().count(), 160);
    let total: u64 = r["histogram"].as_array().unwrap().iter().map(|b| b["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 160);
}

#[test]
fn calibrated_profile_lands_in_band() {
    let r = json_ok(&["benchmark", "--n", "16", "--seed", "1", "--noise", s(&profile())]);
    let mean = r["mean"].as_f64().unwrap();
    assert!((0.746..=0.836).contains(&mean), "{mean}");
}

#[test]
fn process_tomography_limits() {
    let id = data("identity.json");
    let r = json_ok(&["process-tomo", "--unitary", s(&id), "--exact", "--shots", "1"]);
    assert!((r["fidelity"]["F"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let r = json_ok(&["process-tomo", "--unitary", s(&id), "--exact", "--shots", "1", "--noise", s(&data("depolarizing.json"))]);
    assert!((r["fidelity"]["F"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-9);
    assert!((r["fidelity"]["f_bar_from_F"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn outputs_are_deterministic() {
    let args = ["benchmark", "--n", "16", "--seed", "9", "--shots", "50", "--method", "linear"];
    assert_eq!(su4c(&args).stdout, su4c(&args).stdout);
    let args = ["sample", "--n", "3", "--seed", "42"];
    assert_eq!(su4c(&args).stdout, su4c(&args).stdout);
    let other = su4c(&["sample", "--n", "3", "--seed", "43"]).stdout;
    assert_ne!(su4c(&args).stdout, other);
}

#[test]
fn shot_noise_spread_at_100_shots() {
    let r = json_ok(&["benchmark", "--n", "160", "--seed", "8", "--shots", "100", "--method", "linear"]);
    let std = r["std"].as_f64().unwrap();
    assert!((0.02..=0.05).contains(&std), "{std}");
}

fn calibrated_process_tomo() -> Value {
    let u = data("U.json");
    json_ok(&[
        "process-tomo", "--unitary", s(&u), "--unitarity-tolerance", "5e-3", "--noise", s(&profile()), "--exact", "--shots",
        "200", "--seed", "5",
    ])
}

#[test]
fn calibrated_process_fidelities_are_close() {
    let r = calibrated_process_tomo();
    let f = &r["fidelity"];
    let (big_f, f_bar, from_f) =
        (f["F"].as_f64().unwrap(), f["f_bar"].as_f64().unwrap(), f["f_bar_from_F"].as_f64().unwrap());
    println!("INFO calibrated process tomography: F {big_f:.4}, 36-state f_bar {f_bar:.4}, (4F+1)/5 {from_f:.4}");
    assert!((0.5..1.0).contains(&big_f));
    assert!((f_bar - from_f).abs() < 1e-3);
}

#[test]
#[ignore = "the 36 product states are not a 2-design; the relation is exact only for depolarized unitaries"]
fn calibrated_process_fidelity_relation_within_1e6() {
    let r = calibrated_process_tomo();
    let d = (r["fidelity"]["f_bar"].as_f64().unwrap() - r["fidelity"]["f_bar_from_F"].as_f64().unwrap()).abs();
    assert!(d < 1e-6, "|f_bar - (4F+1)/5| = {d:.3e}");
}
