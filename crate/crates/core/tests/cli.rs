mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data;
use serde_json::Value;

fn decaypath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decaypath")).args(args).output().expect("run decaypath")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report JSON on stdout")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn path_on_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let net = data("worked.json");
    let out = decaypath(&["path", arg(&net), "--grid", "0.5:4:4", "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("path.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,component,sigma"));
    let rows: Vec<(f64, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 10);
    for (r, i, s) in rows {
        let expected = if i == 0 { 2.0 * r } else { r };
        assert!((s - expected).abs() <= 1e-9 * expected.max(1.0), "{r} {i} {s}");
    }
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn sgc_falsified_on_identity_gains() {
    let out = decaypath(&["certify", arg(&data("identity_max.json")), "--property", "sgc", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let result = &r["runs"][0]["result"];
    assert_eq!(result["replayed"], Value::Bool(true));
    assert_eq!(result["verdict"], "falsified");
    assert_eq!(result["witness"]["s"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn uges_passes_on_worked_example() {
    let out = decaypath(&["certify", arg(&data("worked.json")), "--property", "uges"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["runs"][0]["result"]["verdict"], "exact-pass");
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(decaypath(&["path", "/nonexistent/net.json"]).status.code(), Some(2));
    assert_eq!(decaypath(&["certify", arg(&data("worked.json")), "--property", "bogus"]).status.code(), Some(2));
    assert_eq!(decaypath(&["path", arg(&data("worked.json")), "--grid", "4:0.5"]).status.code(), Some(2));
    assert_eq!(decaypath(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"version":1,"n":1,"nodes":[{"id":0,"maf":{"kind":"median"},"neighbors":[]}]}"#).unwrap();
    let out = decaypath(&["validate", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodes[0].maf"));
}

#[test]
fn help_exits_0() {
    assert_eq!(decaypath(&["--help"]).status.code(), Some(0));
}

#[test]
fn construction_failure_exits_1() {
    let out = decaypath(&["path", arg(&data("identity_max.json")), "--phi", "linear:10", "--upper"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_is_deterministic() {
    let run = |dir: &Path| {
        let out = decaypath(&["path", arg(&data("power.json")), "--seed", "11", "--out", arg(dir)]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(dir.join("path.csv")).unwrap()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(a.path()), run(b.path()));
}

#[test]
fn truncation_sizes_and_stabilization() {
    let dir = tempfile::tempdir().unwrap();
    let out = decaypath(&[
        "path",
        arg(&data("chain.json")),
        "--truncation",
        "20,40",
        "--grid",
        "0.5:2:3",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["runs"].as_array().unwrap().len(), 2);
    assert_eq!(r["runs"][1]["n"], 40);
    assert!(r["stabilization"][0]["max_difference"].as_f64().unwrap() < 1e-10);
    assert!(dir.path().join("path_n20.csv").exists());
    assert!(dir.path().join("path_n40.csv").exists());
}

#[test]
fn validate_and_simulate() {
    let out = decaypath(&["validate", arg(&data("chain.json")), "--truncation", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let out = decaypath(&["simulate", arg(&data("identity_max.json")), "--operator", "gamma", "--start", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let out = decaypath(&["simulate", arg(&data("worked.json")), "--operator", "gamma-r:1", "--start", "0"]);
    assert_eq!(out.status.code(), Some(0));
}
