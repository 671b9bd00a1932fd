use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use varfl::fixtures;

fn varfl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varfl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("system.json", fixtures::ELEVATOR_SYSTEM),
        ("products.json", fixtures::ELEVATOR_PRODUCTS),
        ("spectra.json", fixtures::ELEVATOR_SPECTRA),
        ("truth.json", fixtures::ELEVATOR_TRUTH),
    ] {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

const INPUTS: [&str; 6] = [
    "--system",
    "system.json",
    "--products",
    "products.json",
    "--spectra",
    "spectra.json",
];

fn localize_args<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["localize"];
    v.extend(INPUTS);
    v.extend(extra);
    v
}

#[test]
fn localize_writes_ranked_list() {
    let dir = fixture_dir();
    let out = varfl(dir.path(), &localize_args(&["--output", "ranked.json"]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ranked: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("ranked.json")).unwrap()).unwrap();
    assert_eq!(ranked["entries"][0]["statement"], "s31");
    assert_eq!(ranked["manifest"]["technique"], "varcop");
}

#[test]
fn localize_to_stdout_matches_file_output() {
    let dir = fixture_dir();
    let stdout = varfl(dir.path(), &localize_args(&[])).stdout;
    varfl(dir.path(), &localize_args(&["--output", "ranked.json"]));
    assert_eq!(stdout, std::fs::read(dir.path().join("ranked.json")).unwrap());
}

#[test]
fn every_technique_succeeds() {
    let dir = fixture_dir();
    for t in ["varcop", "sbfl", "ssbfl", "fb"] {
        let out = varfl(dir.path(), &localize_args(&["--technique", t]));
        assert_eq!(
            out.status.code(),
            Some(0),
            "{t}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn invalid_options_exit_2() {
    let dir = fixture_dir();
    for extra in [
        &["--weight", "1.5"][..],
        &["--metric", "nonsense"],
        &["--agg", "mode"],
        &["--technique", "magic"],
        &["-K", "0"],
    ] {
        let out = varfl(dir.path(), &localize_args(extra));
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(varfl(dir.path(), &["localize"]).status.code(), Some(2));
    assert_eq!(varfl(dir.path(), &["bogus"]).status.code(), Some(2));
    let missing = varfl(
        dir.path(),
        &[
            "localize",
            "--system",
            "nope.json",
            "--products",
            "products.json",
            "--spectra",
            "spectra.json",
        ],
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn malformed_json_exit_2() {
    let dir = fixture_dir();
    std::fs::write(dir.path().join("spectra.json"), "{ not json").unwrap();
    let out = varfl(dir.path(), &localize_args(&[]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn missing_failure_point_exits_3_for_ssbfl() {
    let dir = fixture_dir();
    let mut spectra: Value = serde_json::from_str(fixtures::ELEVATOR_SPECTRA).unwrap();
    for entry in spectra["spectra"].as_array_mut().unwrap() {
        for t in entry["tests"].as_array_mut().unwrap() {
            t.as_object_mut().unwrap().remove("failure_point");
        }
    }
    std::fs::write(dir.path().join("spectra.json"), spectra.to_string()).unwrap();
    let out = varfl(dir.path(), &localize_args(&["--technique", "ssbfl"]));
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // Other techniques do not need failure points.
    assert_eq!(
        varfl(dir.path(), &localize_args(&["--technique", "sbfl"]))
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn no_failing_product_exits_3() {
    let dir = fixture_dir();
    let mut spectra: Value = serde_json::from_str(fixtures::ELEVATOR_SPECTRA).unwrap();
    for entry in spectra["spectra"].as_array_mut().unwrap() {
        for t in entry["tests"].as_array_mut().unwrap() {
            t["outcome"] = "pass".into();
            t.as_object_mut().unwrap().remove("failure_point");
        }
    }
    std::fs::write(dir.path().join("spectra.json"), spectra.to_string()).unwrap();
    assert_eq!(varfl(dir.path(), &localize_args(&[])).status.code(), Some(3));
}

#[test]
fn spcs_command_lists_both_configurations() {
    let dir = fixture_dir();
    let mut args = vec!["spcs"];
    args.extend(INPUTS);
    let out = varfl(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    let spcs: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spcs.as_array().unwrap().len(), 2);
}

#[test]
fn eval_reports_rank_one() {
    let dir = fixture_dir();
    varfl(dir.path(), &localize_args(&["--output", "ranked.json"]));
    let out = varfl(
        dir.path(),
        &[
            "eval",
            "--ranked",
            "ranked.json",
            "--truth",
            "truth.json",
            "--system",
            "system.json",
            "--output",
            "report.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["best_rank"], 1);
    assert_eq!(report["hit_at"]["1"], true);
    assert!(!out.stdout.is_empty());
}

#[test]
fn eval_rejects_unknown_truth_statement() {
    let dir = fixture_dir();
    varfl(dir.path(), &localize_args(&["--output", "ranked.json"]));
    std::fs::write(dir.path().join("truth.json"), r#"{"buggy":["s999"]}"#).unwrap();
    let out = varfl(
        dir.path(),
        &[
            "eval",
            "--ranked",
            "ranked.json",
            "--truth",
            "truth.json",
            "--system",
            "system.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_then_localize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |sub: &str| varfl(dir.path(), &["gen", "--seed", "11", "--output", sub]);
    assert_eq!(gen("a").status.code(), Some(0));
    assert_eq!(gen("b").status.code(), Some(0));
    for name in [
        "system.json",
        "products.json",
        "spectra.json",
        "truth.json",
        "manifest.json",
    ] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between seeded runs");
    }
    let out = varfl(
        dir.path(),
        &[
            "localize",
            "--system",
            "a/system.json",
            "--products",
            "a/products.json",
            "--spectra",
            "a/spectra.json",
            "--output",
            "a/ranked.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = varfl(
        dir.path(),
        &[
            "eval",
            "--ranked",
            "a/ranked.json",
            "--truth",
            "a/truth.json",
            "--system",
            "a/system.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn gen_with_fixed_pc() {
    let dir = tempfile::tempdir().unwrap();
    let out = varfl(
        dir.path(),
        &[
            "gen",
            "--seed",
            "3",
            "--pc",
            r#"{"F1":true,"F2":false}"#,
            "--output",
            "c",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("c/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["buggy_pc"]["F1"], true);
    assert_eq!(manifest["buggy_pc"]["F2"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = fixture_dir();
    for t in ["varcop", "sbfl", "ssbfl", "fb"] {
        let a = varfl(dir.path(), &localize_args(&["--technique", t])).stdout;
        let b = varfl(dir.path(), &localize_args(&["--technique", t])).stdout;
        assert_eq!(a, b, "{t}");
    }
}
