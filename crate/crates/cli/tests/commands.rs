use std::path::Path;
use std::process::{Command, Output};

use qcorr_cli::run_command;
use serde_json::Value;

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .env_remove("QCORR_REPORT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn in_process(args: &[&str]) -> qcorr_cli::Outcome {
    run_command(std::iter::once("qcorr").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_bell_defaults() {
    let out = qcorr(&["verify-bell"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let s = r["results"]["bell"]["s"].as_f64().unwrap();
    assert!((s.abs() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-10);
    assert_eq!(r["schema"], "qcorr-report/1");
    assert_eq!(r["summary"]["all_passed"], true);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("PASS [1] maximal_violation"));
}

#[test]
fn counting_reports_the_deficit() {
    let out = in_process(&["counting", "--d", "2"]);
    assert_eq!(out.code, 0);
    let r = out.report.unwrap();
    let c = &r.results["counting"];
    assert_eq!(c["composite_params"], 10);
    assert_eq!(c["subsystem_params_squared"], 9);
    assert_eq!(c["sufficient"], false);
    assert_eq!(in_process(&["counting", "--d", "1"]).code, 2);
}

#[test]
fn tomography_from_identity_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "c.csv", "word,coefficient\nIIII,1\n");
    let out = in_process(&["tomography", "--input", &csv]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let block = &out.report.unwrap().results["tomography"];
    let m = block["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 16);
    for (i, row) in m.iter().enumerate() {
        for (j, z) in row.as_array().unwrap().iter().enumerate() {
            let want = if i == j { 1.0 / 16.0 } else { 0.0 };
            assert_eq!(z[0].as_f64().unwrap(), want);
            assert_eq!(z[1].as_f64().unwrap(), 0.0);
        }
    }

    let bad = write(dir.path(), "bad.csv", "word,coefficient\nII,1\nXX,1\nYY,1\nZZ,1\n");
    let out = in_process(&["tomography", "--input", &bad]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("FAIL [tomography]"));

    let garbage = write(dir.path(), "g.csv", "word,value\nII,1\n");
    assert_eq!(in_process(&["tomography", "--input", &garbage]).code, 2);
}

#[test]
fn tomography_round_trip_defaults() {
    let out = in_process(&["tomography", "--samples", "20"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.report.unwrap().config.sweeps.tomography_states, 20);
}

#[test]
fn demos_and_bounds_pass() {
    for args in [
        vec!["demo", "mix"],
        vec!["demo", "swap"],
        vec!["demo", "flow"],
        vec!["lhv-bound", "--samples", "200"],
        vec!["tsirelson", "--samples", "100"],
    ] {
        let out = in_process(&args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    }
    let swap = in_process(&["demo", "swap"]).report.unwrap();
    assert_eq!(swap.results["swap"]["outcomes"].as_array().unwrap().len(), 4);
}

#[test]
fn sample_writes_counts_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("counts.csv");
    let out = in_process(&["sample", "--shots", "2000", "--seed", "9", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "setting,a,c,count");
    assert_eq!(lines.len(), 17);
    let total: u64 = lines[1..5].iter().map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 2000);

    // too few shots to clear the 10σ margin
    let out = in_process(&["sample", "--shots", "20", "--seed", "9"]);
    assert_eq!(out.code, 1, "{}", out.stderr);
}

#[test]
fn reports_are_byte_identical() {
    let a = qcorr(&["verify-all", "--shots", "20000", "--seed", "5"]);
    let b = qcorr(&["verify-all", "--shots", "20000", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let c = qcorr(&["verify-all", "--shots", "20000", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_all_fails_only_on_the_single_qubit_check() {
    let out = qcorr(&["verify-all"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["summary"]["total"], 12);
    assert_eq!(r["summary"]["failed_checks"], serde_json::json!(["11"]));
    // summary numbers follow from the check list
    let checks = r["checks"].as_array().unwrap();
    let passed = checks.iter().filter(|c| c["passed"] == true).count();
    assert_eq!(r["summary"]["passed"], passed);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\"state\": {\"amplitudes\": [1, 0, 0]}}", "power of two"),
        ("{\"state\": {\"amplitudes\": [0.9, 0]}}", "state.amplitudes"),
        ("{\"unknown\": 1}", "unknown field"),
        ("{\"state\": \"four_particle_Psi\",", "line"),
        ("{\"shots\": {\"shots_per_setting\": 0}}", "shots"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("c{i}.json"), text);
        let out = qcorr(&["verify-bell", "--config", &path]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(needle), "{text}: {err}");
    }
    let out = qcorr(&["verify-bell", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(qcorr(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn explicit_config_reproduces_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "c.json",
        r#"{"state": "four_particle_Psi", "observables": {"a": "a", "a_prime": "a_prime", "b": "b", "b_prime": "b_prime"}}"#,
    );
    let out = in_process(&["verify-bell", "--config", &path]);
    assert_eq!(out.code, 0);
    let s = out.report.unwrap().results["bell"]["s"].as_f64().unwrap();
    assert!((s + 2.0 * std::f64::consts::SQRT_2).abs() < 1e-10);
}

#[test]
fn report_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(["demo", "flow", "--quiet"])
        .env("QCORR_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("demo-flow.json")).unwrap()).unwrap();
    assert_eq!(written["command"], "demo-flow");

    let explicit = dir.path().join("nested/out.json");
    let out = in_process(&["demo", "mix", "--output", explicit.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(explicit.exists());
}
