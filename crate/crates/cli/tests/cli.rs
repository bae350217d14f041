use std::io::Write;
use std::process::{Command, Output};

use submanifold::catalog::catalog_entries;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submanifold")).args(args).env_remove("SUBMANIFOLD_JOBS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn emb_file(source: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".emb").tempfile().unwrap();
    f.write_all(source.as_bytes()).unwrap();
    f
}

#[test]
fn plane_passes_with_zero_residuals() {
    let out = run(&["verify", "catalog:euclidean-plane", "--points", "10", "--seed", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["points"].as_array().unwrap().len(), 10);
    for key in ["gauss", "codazzi", "ricci", "reconstruction"] {
        assert_eq!(v["aggregate"]["max"][key], 0.0, "{key}");
    }
}

#[test]
fn every_catalog_entry_passes_by_default() {
    for e in catalog_entries() {
        let out = run(&["verify", &format!("catalog:{}", e.name)]);
        assert_eq!(code(&out), 0, "{}: {}", e.name, String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).trim_end().ends_with("PASS"));
    }
}

#[test]
fn corruption_fails_with_exit_one() {
    let out = run(&["verify", "catalog:unit-sphere", "--corrupt", "b:scale:1.001", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["config"]["corrupt"], "b:scale:1.001");
    let gauss = v["aggregate"]["max"]["gauss"].as_f64().unwrap();
    assert!((gauss - 2.001e-3).abs() < 2e-5, "{gauss}");
}

#[test]
fn twist_corruption_fails_in_codimension_two() {
    let out = run(&["verify", "catalog:schwarzschild-6d", "--points", "10", "--corrupt", "A:add:0.01"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "catalog:no-such-thing"])), 2);
    assert_eq!(code(&run(&["verify", "/definitely/missing.emb"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:unit-sphere", "--points", "0"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:unit-sphere", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:unit-sphere", "--corrupt", "b:twist:1"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:unit-sphere", "--format", "xml"])), 2);
    let bad = emb_file("embedding \"x\" { chart u in (0, 1); ambient signature (+); map u; }");
    let out = run(&["verify", bad.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
    let syntax = emb_file("embedding \"x\" { chart u in (0, 1); map u; }");
    let out = run(&["verify", syntax.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error at 1:"));
}

#[test]
fn invalid_jobs_environment_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_submanifold"))
        .args(["verify", "catalog:unit-sphere"])
        .env("SUBMANIFOLD_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn file_input_matches_catalog_input() {
    let e = catalog_entries().iter().find(|e| e.name == "de-sitter").unwrap();
    let file = emb_file(e.source);
    let from_file = run(&["verify", file.path().to_str().unwrap(), "--format", "csv"]);
    let from_catalog = run(&["verify", "catalog:de-sitter", "--format", "csv"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_catalog.stdout);
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(text.starts_with("t,chi,theta,phi,gauss,"));
}

#[test]
fn chart_through_the_pole_is_degenerate() {
    // every sample sits within 1e-9 of the pole
    let src = "embedding \"cap\" { chart theta in (0, 1e-9), phi in (0, 1);
        ambient signature (+, +, +); map sin(theta)*cos(phi); sin(theta)*sin(phi); cos(theta); }";
    let file = emb_file(src);
    let out = run(&["verify", file.path().to_str().unwrap(), "--points", "10", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "degenerate");
    assert_eq!(v["skipped"], 10);
    assert!(v["points"][0]["gauss"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn evaluation_error_inside_the_chart_fails() {
    let src = "embedding \"bad\" { chart u in (-1, 1), v in (0, 1);
        ambient signature (+, +, +); map u; v; log(u); }";
    let file = emb_file(src);
    let out = run(&["verify", file.path().to_str().unwrap(), "--points", "20"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("evaluation error"));
}

#[test]
fn catalog_commands() {
    let out = run(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let listing = String::from_utf8(out.stdout).unwrap();
    for e in catalog_entries() {
        assert!(listing.contains(e.name));
    }
    let out = run(&["catalog", "show", "unit-sphere"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), catalog_entries()[1].source);
    assert_eq!(code(&run(&["catalog", "show", "nope"])), 2);
}
