mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{power_law_causal, rel_err, well_energy};
use serde_json::Value;

fn fracvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvar")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn fracdiff_csv_matches_power_law() {
    let out = fracvar(&["fracdiff", "--alpha", "0.5", "--fn", "t^2", "--n", "2048", "--scheme", "trapezoid"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["t", "f", "derivative"]);
    assert_eq!(rows.len(), 2048);
    for row in rows.iter().skip(205) {
        assert!(rel_err(row[2], power_law_causal(2.0, 0.5, 0.0, row[0])) <= 1e-2);
    }
}

#[test]
fn derive_eom_text() {
    let out = fracvar(&["derive-eom", "--lagrangian", "1.0*q[1] + 0.3*q[0.5] + 4.0*q[0]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("causal reduced: 1·q'' + 0.3·q' + 4·q = 0"));
    assert!(text.contains("retrocausal reduced: 1·q'' - 0.3·q' + 4·q = 0"));
}

#[test]
fn derive_eom_json() {
    let out = fracvar(&[
        "derive-eom",
        "--lagrangian",
        "1*q[1] + 0.3*q[0.25] + 4*q[0]",
        "--alpha",
        "0.5",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reduced"]["retrocausal"]["damping"].as_f64(), Some(-0.3));
}

#[test]
fn eigensolve_well_json() {
    let out = fracvar(&["eigensolve", "--potential", "well, 1", "--count", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let energies: Vec<f64> = v["energies"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert_eq!(energies.len(), 3);
    for (i, e) in energies.iter().enumerate() {
        assert!(rel_err(*e, well_energy(i + 1, 1.0, 1.0, 1.0)) <= 1e-3);
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("osc.json");
    std::fs::write(
        &cfg,
        r#"{"command": "oscillate", "m": 1.0, "c": 0.3, "k": 4.0, "grid": {"a": 0.0, "b": 2.0, "n": 201}}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = fracvar(&["--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 201);
    assert_eq!(rows.last().unwrap()[0], 2.0);

    let out = fracvar(&["--config", cfg, "oscillate", "--n", "101"]);
    assert_eq!(parse_csv(&stdout(&out)).1.len(), 101);

    let out = fracvar(&["--config", cfg, "fracdiff"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(dir.path().join("bad.json"), r#"{"command": "oscillate", "mass_typo": 1}"#).unwrap();
    let out = fracvar(&["--config", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let out = fracvar(&[
            "dampedwave",
            "--xi",
            "0.3",
            "--energy",
            "1.5",
            "--n",
            "2001",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn failures_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("never.csv");
    let out = fracvar(&["dampedwave", "--B", "0", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("B = 0"));
    assert!(!Path::new(&target).exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn exit_codes() {
    assert_eq!(fracvar(&[]).status.code(), Some(2));
    assert_eq!(fracvar(&["--help"]).status.code(), Some(0));
    assert_eq!(fracvar(&["fracdiff", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(fracvar(&["fracdiff", "--alpha", "0.5", "--fn", "t", "--bogus"]).status.code(), Some(2));
    assert_eq!(fracvar(&["fracdiff", "--alpha", "2.5", "--fn", "t"]).status.code(), Some(1));
    assert_eq!(fracvar(&["derive-eom", "--lagrangian", "1*q[1] + 1*q[1]"]).status.code(), Some(1));
    assert_eq!(fracvar(&["derive-eom", "--lagrangian", "1*q[1]", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(fracvar(&["oscillate", "--m", "0"]).status.code(), Some(1));
}

#[test]
fn verify_passes() {
    let out = fracvar(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
