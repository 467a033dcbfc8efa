//! End-to-end tests of the `mekr` binary: output formats, exit codes,
//! ledger behavior, and thread-count independence.

use std::path::Path;
use std::process::{Command, Output};

fn mekr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mekr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn ledger_lines(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn coeffs_csv_row() {
    let out = mekr(&["coeffs", "--k", "4", "--m", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "l,C\n2,1\n3,3\n4,1\n");
}

#[test]
fn coeffs_json_row() {
    let out = mekr(&["coeffs", "--k", "4", "--m", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!({"2": "1", "3": "3", "4": "1"}));
}

#[test]
fn coeffs_unbounded_multiplicity() {
    // m = inf is normalized to m = k, giving the binomial row C(3, l-1).
    let out = mekr(&["coeffs", "--k", "4", "--m", "inf", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "l,C\n1,1\n2,3\n3,3\n4,1\n");
}

#[test]
fn spectrum_profile_json() {
    let out = mekr(&["spectrum", "--k", "4", "--m", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["alpha"], 3);
    assert_eq!(v["peak"], "3");
    assert_eq!(v["unimodal"], true);
}

#[test]
fn window_json() {
    let out = mekr(&["window", "--j", "1", "--l", "1", "--r", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bounds"], serde_json::json!([1, 3]));
}

#[test]
fn verify_report_json() {
    let out = mekr(&["verify", "--n", "4", "--m", "2", "--k", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["max_size"], "4");
    assert_eq!(v["star_size"], "4");
    assert_eq!(v["theorem_case"], "a");
    assert_eq!(v["extremal_unique"], true);
    assert_eq!(v["witness"], serde_json::Value::Null);
}

#[test]
fn verify_below_threshold_is_usage_error() {
    let out = mekr(&["verify", "--n", "2", "--m", "2", "--k", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = mekr(&["coeffs", "--k", "4", "--m", "2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn maximal_count_only() {
    let out = mekr(&["maximal", "--n", "4", "--count-only"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!({"n": 4, "count": 12}));
}

#[test]
fn maximal_families_listing() {
    let out = mekr(&["maximal", "--n", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!([[1], [2]]));
}

#[test]
fn construct_star_and_remark() {
    let out = mekr(&["construct", "star", "--n", "3", "--m", "2", "--k", "2"]);
    assert!(out.status.success());
    let v: Vec<Vec<u32>> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, vec![vec![1, 0, 1], vec![1, 1, 0], vec![2, 0, 0]]);

    let out = mekr(&["construct", "remark", "--n", "3", "--m", "2", "--k", "2"]);
    assert!(out.status.success());
    let v: Vec<Vec<u32>> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);

    let out = mekr(&["construct", "remark", "--n", "6", "--m", "2", "--k", "4"]);
    assert!(out.status.success());
    let v: Vec<Vec<u32>> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.len(), 45);

    // Uniqueness cases reject the construction.
    let out = mekr(&["construct", "remark", "--n", "5", "--m", "2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_fst() {
    let out = mekr(&[
        "construct",
        "fst",
        "--n",
        "4",
        "--m",
        "2",
        "--k",
        "2",
        "--s",
        "1",
        "--t",
        "1",
    ]);
    assert!(out.status.success());
    let v: Vec<Vec<u32>> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.len(), 6);
}

#[test]
fn check_transform_passes() {
    let out = mekr(&["check", "transform", "--m-max", "3", "--q-max", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0]["pass"], true);
}

#[test]
fn check_inequalities_small_ranges_pass() {
    let out = mekr(&[
        "check",
        "inequalities",
        "--k-max",
        "30",
        "--m-max",
        "3",
        "--n-pad",
        "5",
        "--window-k-max",
        "12",
        "--window-m-max",
        "3",
        "--interval-m-max",
        "6",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    for report in v.as_array().unwrap() {
        assert_eq!(report["pass"], true, "property {}", report["property"]);
    }
}

#[test]
fn sweep_ledger_round_trips_and_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let four = dir.path().join("four.jsonl");

    let out = mekr(&[
        "sweep",
        "--n-max",
        "4",
        "--m-max",
        "2",
        "--k-max",
        "3",
        "--ledger",
        one.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["violations"], 0);

    let out = mekr(&[
        "sweep",
        "--n-max",
        "4",
        "--m-max",
        "2",
        "--k-max",
        "3",
        "--ledger",
        four.to_str().unwrap(),
        "--threads",
        "4",
    ]);
    assert!(out.status.success());

    // Byte-level round trip of each ledger line.
    let raw = std::fs::read_to_string(&one).unwrap();
    for line in raw.lines().filter(|l| !l.is_empty()) {
        let v: mekr::verify::LedgerRecord = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), line);
    }

    // Identical apart from duration_ms, regardless of thread count.
    let mut a = ledger_lines(&one);
    let mut b = ledger_lines(&four);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        x["duration_ms"] = serde_json::json!(0);
        y["duration_ms"] = serde_json::json!(0);
        assert_eq!(x, y);
    }
}

#[test]
fn thread_count_env_variable_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_mekr"))
        .args(["verify", "--n", "4", "--m", "2", "--k", "2"])
        .env("MEKR_THREADS", "2")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["max_size"], "4");

    // A malformed value falls back to the default pool rather than failing.
    let out = Command::new(env!("CARGO_BIN_EXE_mekr"))
        .args(["verify", "--n", "4", "--m", "2", "--k", "2"])
        .env("MEKR_THREADS", "zebra")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
}

#[test]
fn verify_appends_to_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.jsonl");
    for _ in 0..2 {
        let out = mekr(&[
            "verify",
            "--n",
            "4",
            "--m",
            "2",
            "--k",
            "2",
            "--ledger",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let lines = ledger_lines(&path);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["max_size"], "4");
}
