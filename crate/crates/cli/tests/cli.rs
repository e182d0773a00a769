use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitzkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn config_file(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("hurwitzkit-cli-{}-{name}.json", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn cstar_density_is_exact() {
    for (p, want) in [("1,0", 0.125), ("2,0", 0.0625), ("0,1", 0.125)] {
        let out = run(&["density", "--domain", "cstar", "--point", p]);
        assert!(out.status.success());
        let v = json(&out);
        assert_eq!(v["value"].as_f64(), Some(want));
        assert_eq!(v["provenance"], "ClosedForm");
    }
}

#[test]
fn negative_coordinates_parse() {
    let out = run(&["density", "--domain", "cstar", "--point", "-2,0", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "re,im,lower,upper,provenance\n-2,0,0.0625,0.0625,ClosedForm\n");
}

#[test]
fn punctured_disk_reports_both_normalizations() {
    let v = json(&run(&["density", "--domain", "punctured-disk", "--point", "0.5,0", "--paper-normalization"]));
    assert_eq!(v["provenance"], "Interval");
    assert_eq!(v["upper"].as_f64(), Some(3.0));
    assert_eq!(v["paper_normalization_upper"].as_f64(), Some(1.5));
}

#[test]
fn hyperbolic_distance_in_the_disk() {
    let out = run(&["distance", "--domain", "disk:0,0,1", "--metric", "hyperbolic", "--points", "0,0:0.5,0"]);
    assert!(out.status.success());
    let d = json(&out)["distance"].as_f64().unwrap();
    assert!((d - 3f64.ln()).abs() < 1e-3 * 3f64.ln(), "{d}");

    let csv = run(&["distance", "--domain", "disk:0,0,1", "--metric", "hyperbolic", "--points", "0,0:0.5,0", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im"));
    assert_eq!(lines.next(), Some("0,0"));
    assert_eq!(text.lines().last(), Some("0.5,0"));
}

#[test]
fn bounds_certificate_shape() {
    let v = json(&run(&["bounds", "--basepoint-domain", "punctured-disk", "--domain", "cstar", "--point", "1,0", "--tol", "1e-3"]));
    assert_eq!(v["lower"].as_f64(), Some(0.125));
    assert_eq!(v["converged"], true);
    assert_eq!(v["witness"]["family"], "RestrictionFamily");
    assert!(v["witness"]["s_re"].is_f64());
}

#[test]
fn unbounded_certificate_serializes_null() {
    // no candidate family from the punctured plane into a disk
    let out = run(&["bounds", "--basepoint-domain", "cstar", "--domain", "disk:0,0,1", "--point", "0,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["upper"].is_null());
    assert!(v["witness"].is_null());
}

#[test]
fn contraction_report_classifies() {
    let v = json(&run(&["contraction", "--domain", "punctured-disk", "--outer", "disk:0,0,1"]));
    assert_eq!(v["classification"], "NonLipschitz");
    assert!(v["l_interval"]["lower"].as_f64().unwrap() >= 0.999);
    let v = json(&run(&["contraction", "--domain", "disk:0,0,0.5", "--outer", "disk:0,0,1"]));
    assert_eq!(v["classification"], "Lipschitz");
}

#[test]
fn covering_hits_its_basepoint() {
    let v = json(&run(&["covering", "--domain", "cstar", "--point", "1,0", "--at", "0,0"]));
    assert_eq!(v["derivative_at_origin"].as_f64(), Some(16.0));
    assert_eq!(v["values"][0]["value"][0].as_f64(), Some(1.0));
}

#[test]
fn exit_codes() {
    let usage = run(&["density", "--domain", "bogus", "--point", "1,0"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--domain"));
    assert_eq!(run(&["density", "--domain", "cstar"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "no-such-check"]).status.code(), Some(2));

    let numerical = run(&["density", "--domain", "disk:0,0,1", "--point", "2,0"]);
    assert_eq!(numerical.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&numerical.stderr).contains("OutsideDomain"));

    let bad = config_file("unknown", r#"{"bogus": 1}"#);
    assert_eq!(run(&["verify", "--suite", "thm2", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    // two refinement levels cannot meet a 1e-13 rotation tolerance
    let cfg = config_file("strict", r#"{"distance_tolerance": 1e-13, "max_levels": 2, "distance_pairs": 10}"#);
    let out = run(&["verify", "--suite", "def2-refinement", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)[0]["status"], "fail");
}

#[test]
fn verify_all_lists_every_check_once() {
    let cfg = config_file(
        "small",
        r#"{"density_samples": 500, "distance_pairs": 10, "triangle_triples": 20, "certificate_calls": 200}"#,
    );
    let out = run(&["verify", "--suite", "all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let outcomes = json(&out);
    let ids: Vec<&str> = outcomes.as_array().unwrap().iter().map(|o| o["id"].as_str().unwrap()).collect();
    assert_eq!(ids, hurwitzkit::verify::CHECK_IDS);
    assert!(outcomes.as_array().unwrap().iter().all(|o| o["status"] == "pass"));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["verify", "--suite", "def2-triangle", "--seed", "7", "--format", "csv"];
    let first = run(&args);
    let again = run(&args);
    let single = Command::new(env!("CARGO_BIN_EXE_hurwitzkit")).args(args).env("HURWITZKIT_THREADS", "1").output().unwrap();
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, single.stdout);
}
