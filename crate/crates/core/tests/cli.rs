use std::process::Command;

use biquotient_flats::cli::{run_with, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use biquotient_flats::scan::CSV_HEADER;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("biquotient").chain(args.iter().copied()).map(String::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn help_matches_golden_files() {
    assert_eq!(run(&["--help"]).1, include_str!("golden/help.txt"));
    assert_eq!(run(&["scan", "--help"]).1, include_str!("golden/help_scan.txt"));
}

#[test]
fn help_lists_every_flag_with_default() {
    let help = run(&["scan", "--help"]).1;
    for flag in [
        "--n",
        "--t",
        "--res",
        "--tol",
        "--seed",
        "--restarts",
        "--theta",
        "--alpha",
        "--b",
        "--out",
        "--format",
        "--include-boundary",
        "--suite",
    ] {
        let line = help.lines().find(|l| l.trim_start().starts_with(flag)).unwrap_or_else(|| panic!("{flag}"));
        assert!(line.contains("[default:"), "{line}");
    }
}

#[test]
fn scan_res_50_writes_2500_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let p = path.to_str().unwrap();
    let (code, out, err) = run(&["scan", "--n", "2", "--t", "1", "--res", "50", "--seed", "7", "--out", p]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("# config {\"command\":\"scan\""));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 2500);
}

#[test]
fn witness_for_open_family() {
    let (code, out, err) =
        run(&["witness", "--n", "3", "--theta", "1.0471975511965976", "--alpha", "0.7853981633974483", "--b", "i"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["valid"], true);
    let r = &v["witness"]["residuals"];
    assert!(r["condition_b_norm"].as_f64().unwrap() <= 1e-12);
    assert!(r["condition_c_gram"].as_f64().unwrap() <= 1e-11);
    assert!(r["lift_numerator"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["config"]["n"], 3);
}

#[test]
fn witness_off_locus_fails_verification() {
    let (code, out, _) = run(&["witness", "--theta", "1.0", "--alpha", "0.3", "--restarts", "2"]);
    assert_eq!(code, EXIT_FAILED);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["best_objective"].as_f64().unwrap() > 1e-6);
}

#[test]
fn classify_reports_method() {
    let (code, out, _) = run(&["classify", "--theta", "0.5", "--alpha", "1.5707963267948966"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["row"]["flat_found"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["scan", "--nope"]).0, EXIT_USAGE);
    assert_eq!(run(&["scan", "--res", "abc"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--suite", "geometry"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--suite", "topology"]).0, EXIT_OK);
    assert_eq!(run(&["topology"]).0, EXIT_OK);

    let bin = env!("CARGO_BIN_EXE_biquotient");
    let status = Command::new(bin).args(["scan", "--t", "-1"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    assert!(!status.stderr.is_empty());
    let status = Command::new(bin).args(["verify", "--suite", "algebra"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
}

#[test]
fn verify_json_and_csv() {
    let (code, out, _) = run(&["verify", "--suite", "orbits", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["suite"], "orbits");
    let (_, csv, _) = run(&["verify", "--suite", "topology", "--format", "csv"]);
    assert!(csv.lines().nth(1).unwrap().starts_with("suite,name,status"));
    assert!(csv.contains("topology,quotient_q2,NOTE"));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["scan", "--res", "8", "--restarts", "3", "--seed", "9", "--include-boundary"];
    let a = run(&args).1;
    assert_eq!(a, run(&args).1);
    assert!(a.lines().nth(1).unwrap().ends_with(",region"));
    let args = ["reduce", "--n", "3", "--seed", "4"];
    assert_eq!(run(&args).1, run(&args).1);
}
