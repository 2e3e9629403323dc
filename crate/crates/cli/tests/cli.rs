use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qudit_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-lab"))
        .args(args)
        .env_remove("QUDIT_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn table_csv_rows() {
    let out = qudit_lab(&[
        "table1",
        "--d-list",
        "2,3",
        "--format",
        "csv",
        "--samples",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "d,F_parallel,F_local,F_perp,flag");
    assert_eq!(lines[1], "2,0.7500,0.7887,0.7887,");
    assert_eq!(lines[2], "3,0.6000,0.6444,0.6449,");
}

#[test]
fn table_flags_the_d6_cell() {
    let out = qudit_lab(&["table1", "--d-list", "6", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let flags: Vec<String> = serde_json::from_value(v["flags"].clone()).unwrap();
    assert!(flags
        .iter()
        .any(|f| f.contains("d=6 F_local") && f.contains("0.4195")));
    assert!(flags.iter().any(|f| f.starts_with("psi_perp")));
    for key in ["version", "config", "results", "residuals"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn bound_with_fuzz() {
    let out = qudit_lab(&["bound", "--d", "2", "--n", "1", "--fuzz", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let bound = v["results"]["bound"].as_f64().unwrap();
    assert!((bound - 2.0 / 3.0).abs() < 1e-12);
    assert!(v["results"]["fuzz"]["max_fidelity"].as_f64().unwrap() <= bound + 1e-9);
    assert_eq!(v["results"]["fuzz"]["violations"], 0);
}

#[test]
fn selftest_passes() {
    let out = qudit_lab(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert!(v["results"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn optimize_reports_feasible_optimum() {
    let out = qudit_lab(&[
        "optimize",
        "--d",
        "2",
        "--case",
        "parallel",
        "--restarts",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let f = v["results"]["result"]["best_fidelity"].as_f64().unwrap();
    assert!((f - 0.75).abs() < 1e-4);
    assert!(v["residuals"]["min_eig"].as_f64().unwrap() >= -1e-8);
}

#[test]
fn simulate_case_one() {
    let out = qudit_lab(&[
        "simulate",
        "--d",
        "2",
        "--case",
        "parallel",
        "--samples",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rate = v["results"]["simulation"]["acceptance_rate"]
        .as_f64()
        .unwrap();
    assert!((rate - 1.0 / 3.0).abs() < 0.02);
    assert_eq!(v["results"]["operator"], "case_one_opt");
}

#[test]
fn same_seed_same_bytes() {
    let path = scratch("determinism.json");
    let p = path.to_str().unwrap();
    let args = [
        "simulate",
        "--d",
        "2",
        "--case",
        "conjugate",
        "--samples",
        "3000",
        "-o",
        p,
    ];
    assert_eq!(qudit_lab(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    assert_eq!(qudit_lab(&threaded).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn env_seed_overrides_default() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qudit-lab"));
        c.args([
            "simulate",
            "--d",
            "2",
            "--case",
            "parallel",
            "--samples",
            "500",
        ]);
        match seed {
            Some(s) => c.env("QUDIT_LAB_SEED", s),
            None => c.env_remove("QUDIT_LAB_SEED"),
        };
        json(&c.output().unwrap())["config"]["global"]["seed"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(run(None), 0x5EED_C0DE);
    assert_eq!(run(Some("0x10")), 16);
}

#[test]
fn validation_failures_exit_2() {
    for args in [
        vec!["--frobnicate"],
        vec!["optimize", "--d", "3", "--case", "sideways"],
        vec!["optimize", "--d", "1", "--case", "parallel"],
        vec!["bound", "--d", "40", "--n", "9"],
        vec!["simulate", "--d", "99", "--case", "parallel"],
        vec!["table1", "--d-list", "1"],
    ] {
        let out = qudit_lab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_cleanly() {
    let out = qudit_lab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("table1"));
}
