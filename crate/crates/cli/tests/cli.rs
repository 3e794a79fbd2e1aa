use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn rigcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigcoh")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rigcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn lists_examples() {
    let out = rigcoh(&["examples"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().next()).collect();
    for want in ["point", "affine-line", "gm", "gm-alt", "ft-point", "mixed-complex"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
}

#[test]
fn bad_relation_reports_its_position() {
    let path = scratch("bad.toml", "kind = \"rigid\"\n[algebra]\nvars = [\"x\"]\nrelations = [\"x^^2\"]\n");
    let out = rigcoh(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml:4:"), "{err}");
}

#[test]
fn unknown_task_is_an_error() {
    let out = rigcoh(&["run", "no-such-example"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_for_the_point() {
    let path = std::env::temp_dir().join(format!("rigcoh-point-{}.json", std::process::id()));
    let out = rigcoh(&["run", "point", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "rigcoh-report/1");
    assert_eq!(v["passed"], true);
    assert!(v["timing"]["wall_clock_ms"].is_number());
    let checks = v["payload"]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn rational_backend_leaves_agreement_uncertified() {
    let out = rigcoh(&["run", "affine-line", "--backend", "rational"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["backend"], "rational");
    for row in v["payload"]["agreement"].as_array().unwrap() {
        assert_eq!(row["certified"], false);
        assert!(row["padic"].is_null());
    }
}
