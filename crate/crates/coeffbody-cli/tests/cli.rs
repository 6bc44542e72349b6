//! End-to-end checks of the `coeffbody` binary: exit codes, file schemas,
//! and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coeffbody"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    (dir, path)
}

#[test]
fn starlike_run_writes_expected_c2_column() {
    let (_dir, path) = tmp("star.csv");
    let out = run(&[
        "loewner",
        "--preset",
        "starlike",
        "--n",
        "3",
        "--t-end",
        "3",
        "--steps",
        "3000",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3");
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let t = fields[0];
        let want = 0.5 * ((-2.0 * t).exp() - 1.0);
        assert!((fields[3] - want).abs() <= 1e-8, "t = {t}");
        assert!(fields[1].abs() <= 1e-8 && fields[5].abs() <= 1e-8);
    }
}

#[test]
fn identity_run_keeps_zero_columns() {
    let (_dir, path) = tmp("id.csv");
    let out = run(&[
        "loewner",
        "--preset",
        "identity",
        "--n",
        "4",
        "--steps",
        "100",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',').skip(1) {
            assert_eq!(field.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn invalid_driving_exits_2() {
    let out = run(&["loewner", "--preset", "constant:4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("positivity"), "stderr: {err}");
}

#[test]
fn unknown_preset_exits_2() {
    let out = run(&["loewner", "--preset", "spiral", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_trajectory_schema() {
    let out = run(&[
        "loewner",
        "--preset",
        "starlike",
        "--n",
        "2",
        "--steps",
        "4",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["n"], 2);
    let samples = value["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 5);
    assert!(samples[0]["c"][0].as_array().unwrap().len() == 2);
}

#[test]
fn geodesic_closed_form_comparison_passes() {
    let (_dir, path) = tmp("geo.csv");
    let out = run(&[
        "geodesic",
        "--xi",
        "0.2+0.1i,-0.3,0.4i",
        "--compare-closed-form",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("closed-form gap"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(
        "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,re_xi1,im_xi1,re_xi2,im_xi2,re_xi3,im_xi3,H"
    ));
}

#[test]
fn geodesic_zero_covector_is_flat() {
    let out = run(&["geodesic", "--xi", "0,0,0", "--steps", "10", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for sample in value["samples"].as_array().unwrap() {
        assert_eq!(sample["H"], 0.0);
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["brackets", "contact", "neretin"] {
        let out = run(&["verify", suite]);
        assert!(out.status.success(), "suite {suite}");
        let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(value["pass"], true, "suite {suite}");
        assert_eq!(value["suite"], suite);
    }
    // spec-sized invocations
    let out = run(&["verify", "brackets", "--n", "6"]);
    assert!(out.status.success());
    let out = run(&["verify", "neretin", "--max", "6"]);
    assert!(out.status.success());
}

#[test]
fn verify_randomized_suites_pass_with_small_runs() {
    for suite in ["integrals", "geodesic", "variation"] {
        let out = run(&["verify", suite, "--runs", "4", "--seed", "1"]);
        assert!(
            out.status.success(),
            "suite {suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn verify_unknown_suite_exits_2() {
    let out = run(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_are_deterministic() {
    let args = ["verify", "geodesic", "--runs", "3", "--seed", "42"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    // determinism must hold regardless of worker count
    let single = bin()
        .args(args)
        .env("COEFFBODY_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.stdout, single.stdout);
}

#[test]
fn trajectory_files_are_deterministic() {
    let (_dir, a) = tmp("a.csv");
    let (_dir2, b) = tmp("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "loewner",
            "--preset",
            "constant:0.3+0.2i,0.5",
            "--n",
            "3",
            "--steps",
            "200",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bracket_table_emits_full_table() {
    let out = run(&["bracket-table", "--n", "4"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["all_match"], true);
    assert_eq!(value["entries"].as_array().unwrap().len(), 16);
    let first = &value["entries"][0];
    assert_eq!(first["result"], "(0)L_2");
}

#[test]
fn contact_check_prints_exact_pass() {
    let out = run(&["contact-check"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS (exact)"));
    assert!(text.contains("dc1^dc2^dc3"));
}

#[test]
fn neretin_emits_canonical_terms() {
    let out = run(&["neretin", "--max", "4"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let polys = value["polynomials"].as_array().unwrap();
    assert_eq!(polys.len(), 3); // P_2, P_3, P_4
    let p2 = &polys[0];
    assert_eq!(p2["n"], 2);
    let terms = p2["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["coeff"], "1/2");
    assert_eq!(terms[0]["monomial"]["c2"], 1);
    assert_eq!(terms[0]["monomial"]["charge"], 1);
}

#[test]
fn driving_table_file_roundtrip() {
    let (_dir, table) = tmp("drive.json");
    std::fs::write(
        &table,
        r#"{"times": [0.0, 1.0], "p": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}"#,
    )
    .unwrap();
    let out = run(&[
        "loewner",
        "--driving-file",
        table.to_str().unwrap(),
        "--t-end",
        "2",
        "--steps",
        "100",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["n"], 2);
}
