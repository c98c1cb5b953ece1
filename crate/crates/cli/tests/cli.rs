//! End-to-end tests of the `vocheck` binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vocheck"))
}

#[test]
fn lists_every_suite() {
    let out = bin().arg("list-suites").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in vocheck_core::SUITE_NAMES {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn runs_selected_suites_and_writes_report() {
    let dir = std::env::temp_dir().join("vocheck-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = bin()
        .args(["run", "--suite", "clock-shift", "--suite", "delta"])
        .arg("--report")
        .arg(&path)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "stdout: {text}");
    assert!(text.contains("clock-shift"));
    assert!(text.contains("delta"));
    assert!(text.contains("overall: pass"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["cases"].as_array().unwrap().len() > 4);
    assert_eq!(report["config"]["m"], 2);
}

#[test]
fn rejects_root_of_unity_parameter() {
    let out = bin().args(["run", "--q=-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stderr).unwrap();
    assert!(text.contains("root of unity"));
}

#[test]
fn rejects_unknown_suite() {
    let out = bin().args(["run", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejects_malformed_complex() {
    let out = bin().args(["run", "--q", "fish"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
