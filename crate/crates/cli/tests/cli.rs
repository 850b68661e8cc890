use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn operators() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("operators")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumhodge")).args(args).env_remove("MUMHODGE_MAX_PRECISION").output().unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (value, out.status.code().unwrap())
}

fn op(name: &str) -> String {
    operators().join(name).display().to_string()
}

#[test]
fn malformed_rational_exits_with_parse_code() {
    let dir = std::env::temp_dir().join(format!("mumhodge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.toml");
    std::fs::write(&file, "name = \"bad\"\n[theta_coefficients]\n0 = [\"1/0\", \"0\", \"0\", \"0\", \"1\"]\n").unwrap();
    let out = run(&["analyze", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&["normal-form", "--quadruple", "1,5,x,0"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", dir.join("missing.toml").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn theta4_has_mum_points_at_both_ends_and_skips_continuation() {
    let (r, code) = json(&["analyze", &op("theta4.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["mum_points"], serde_json::json!(["0", "infinity"]));
    assert_eq!(r["frobenius"]["psi3"][0], "1");
    assert_eq!(r["frobenius"]["psi3"][1], "0");
    assert_eq!(r["mirror_map"]["q_of_z"][1], "1");
    assert_eq!(r["mirror_map"]["q_of_z"][2], "0");
    assert_eq!(r["continuation"]["status"], "skipped");
}

#[test]
fn records_with_different_degrees_meet_the_hypothesis() {
    let (r, code) = json(&["torelli", "--records", &op("degrees_42_14.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["torelli"]["branch"], "pairwise");
    assert_eq!(r["torelli"]["hypothesis_met"], true);
    assert_eq!(r["torelli"]["conclusion"], mumhodge_cli::report::HYPOTHESIS_MET);
}

#[test]
fn quintic_takes_the_single_mum_branch() {
    let (r, code) = json(&["analyze", &op("quintic.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["mum_points"], serde_json::json!(["0"]));
    assert_eq!(r["torelli"]["branch"], "single-mum");
    let mum = &r["continuation"]["frame"]["mum"];
    assert_eq!(mum["normal_form"]["b"], "5");
    assert!(r["continuation"]["frame"]["log2_global_residual"].as_f64().unwrap() < -100.0);
    assert_eq!(r["frobenius"]["psi2"][1], "770");
}

#[test]
fn normal_form_of_integral_mum_matrix() {
    let (r, code) = json(&["normal-form", "--matrix", "1,0,0,0;1,1,0,0;2,5,1,0;-5,-3,-1,1"]);
    assert_eq!(code, 0);
    assert_eq!(r["normal_form"]["b"], "5");
    assert_eq!(r["integrality_and_polarization"]["passes"], true);
    let (m, _) = json(&["normal-form", "--mirror", "5,50,-200"]);
    assert_eq!(m["normal_form"], r["normal_form"]);
    assert_eq!(run(&["normal-form", "--matrix", "1,0,0,0;1,1,0,0;1,2,1,0;1,3,3,1"]).status.code(), Some(5));
}

#[test]
fn quintic_quadruple_normalizes_by_sign_flip_and_stabilizer() {
    let (r, code) = json(&["normal-form", "--quadruple=-1,5,11/2,-25/6", "--sign-flip", "--stabilizer", "0,5,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(r["normal_form"], serde_json::json!({ "a": "1", "b": "5", "e": "-1/2", "f": "-25/6" }));
    assert_eq!(r["integrality_and_polarization"]["passes"], true);
}

#[test]
fn output_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("mumhodge-det-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("monodromy-{k}.json"));
        let out = run(&["monodromy", &op("quintic.toml"), "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push((std::fs::read(&path).unwrap(), out.stdout));
    }
    assert_eq!(reports[0], reports[1]);
    let r: Value = serde_json::from_slice(&reports[0].0).unwrap();
    assert_eq!(r["loops"][0]["recognized"][3], serde_json::json!(["1", "3", "3", "1"]));
}
