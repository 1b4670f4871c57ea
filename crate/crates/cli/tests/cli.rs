use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_symcond"));
    c.env_remove("SYMCOND_SEED");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_reports_complete_probabilities() {
    let o = run(&["run", fixture("fig1.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let outcomes = report["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 2);
    let sum: f64 = outcomes.iter().map(|x| x["probability"].as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-10);
    assert_eq!(report["tolerance"].as_f64(), Some(1e-9));
    assert_eq!(report["theorems"][1]["status"], "held");
}

#[test]
fn malformed_scenario_exits_2_with_field_path() {
    let o = run(&["run", fixture("malformed.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("model.jaynes-cummings.dim_apparatus"),
        "{}",
        stderr(&o)
    );
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn truncated_scenario_exits_2() {
    let o = run(&["run", fixture("truncated.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_trace_exits_3_naming_the_invariant() {
    let o = run(&["run", fixture("bad_trace.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("trace"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_4() {
    let o = run(&["run", "/definitely/not/here.scenario"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing/sub/dir.csv");
    let o = run(&["fig1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unknown_flag_exits_2() {
    let o = run(&["run", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theorems_exit_codes() {
    let fig1 = scenario("fig1.scenario");
    let o = run(&["theorems", fig1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["theorems"][1]["theorem"], "theorem2");
    assert_eq!(v["theorems"][1]["status"], "held");
    let o = run(&["theorems", "--require", "theorem2", fig1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let shifted = scenario("fig1_phase_0.4pi.scenario");
    let o = run(&["theorems", shifted.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("hypothesis not satisfied"));

    let adversarial = scenario("theorem2_adversarial.scenario");
    let o = run(&["theorems", "--require", "theorem2", adversarial.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    assert!(stderr(&o).contains("symmetric_state"), "{}", stderr(&o));
}

#[test]
fn phase_flag_matches_phase_in_file() {
    let a = run(&[
        "theorems",
        "--phase",
        "0.4pi",
        scenario("fig1.scenario").to_str().unwrap(),
    ]);
    let b = run(&["theorems", scenario("fig1_phase_0.4pi.scenario").to_str().unwrap()]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["source"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn sweep_flags_override_scenario_grid() {
    let o = run(&[
        "sweep",
        scenario("fig1.scenario").to_str().unwrap(),
        "--from",
        "0",
        "--to",
        "pi",
        "--steps",
        "3",
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("0.0000000000000000e0,+,"));
    assert!(rows[1].starts_with("0.0000000000000000e0,-,"));
}

#[test]
fn sweep_of_fixed_state_is_rejected() {
    let o = run(&[
        "sweep",
        scenario("explicit_swap.scenario").to_str().unwrap(),
        "--steps",
        "3",
        "--from",
        "0",
        "--to",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig1_csv_shape_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    let o = run(&["fig1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next(),
        Some("phi,outcome,probability,delta_coherent,delta_decohered,difference")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 402);
    let diff = |r: &Vec<&str>| r[5].parse::<f64>().unwrap();
    for k in [0, 1, 200, 201] {
        assert!(diff(&rows[k]).abs() < 1e-9, "row {k}");
    }
    for (first, last) in rows[0].iter().zip(&rows[400]).skip(2) {
        let (first, last): (f64, f64) = (first.parse().unwrap(), last.parse().unwrap());
        assert!((first - last).abs() < 1e-9);
    }
}

#[test]
fn selftest_respects_seed() {
    let a = bin().arg("selftest").arg("--quiet").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    let b = bin()
        .env("SYMCOND_SEED", "7")
        .args(["selftest", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(b.status.code(), Some(0));
    let w: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(w["seed"], 7);
    let bad = bin().env("SYMCOND_SEED", "seven").args(["selftest"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let fig1 = scenario("fig1.scenario");
    let f = fig1.to_str().unwrap();
    for args in [
        vec!["run", f],
        vec!["run", "--format", "csv", f],
        vec!["sweep", f],
        vec!["sweep", "--format", "json", f],
        vec!["theorems", "--format", "csv", f],
        vec!["selftest", "--format", "csv"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
