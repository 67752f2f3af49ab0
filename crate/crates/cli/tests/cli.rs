// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_setflow");

fn setflow(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn setflow")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_into(dir: &Path, names: &[&str]) -> Output {
    let mut args = vec!["run"];
    args.extend_from_slice(names);
    args.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    setflow(&args)
}

fn read_report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn list_shows_every_builtin() {
    let o = setflow(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().next()).collect();
    assert_eq!(names, ["ex51", "ex52", "ex53", "ex54", "ex55"]);
}

#[test]
fn builtins_run_and_pass() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["ex51", "ex52", "ex53_k2", "ex53_k4_instability", "ex54", "ex55"];
    let o = run_into(dir.path(), &names);
    assert!(o.status.success(), "stdout {}\nstderr {}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    for name in names {
        let report = read_report(dir.path(), name);
        assert_eq!(report["status"], "passed", "{name}");
        assert_eq!(report["scenario"], name);
        let checks = report["checks"].as_array().unwrap();
        assert!(!checks.is_empty(), "{name}");
        assert!(checks.iter().all(|c| c["passed"] == true), "{name}");

        let csv = fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header[0], "t");
        assert!(header.contains(&"V"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len() as u64, report["frames"].as_u64().unwrap());
        for row in &rows {
            assert_eq!(row.split(',').count(), header.len());
            assert!(row.split(',').all(|f| f.parse::<f64>().is_ok()));
        }
    }
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_into(a.path(), &["ex52", "ex54"]).status.success());
    assert!(setflow(&["run", "ex52", "ex54", "--jobs", "2", "--out", b.path().to_str().unwrap()]).status.success());
    for file in ["ex52.csv", "ex52.json", "ex54.csv", "ex54.json"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn show_prints_loadable_scenario() {
    let o = setflow(&["show", "ex51"]);
    assert!(o.status.success());
    let s = setflow_cli::Scenario::from_json(&stdout(&o)).unwrap();
    assert_eq!(s.name, "ex51");
}

fn valid_scenario() -> Value {
    serde_json::json!({
        "schema": 1, "name": "x", "horizon": 1.0, "dt": 0.1,
        "initial_body": {"kind": "ball", "radius": 1.0},
        "params": {
            "a": [[0.0, 0.0], [0.0, 0.0]],
            "phi": {"name": "constant", "params": {"value": 1.0}},
            "source": {"name": "zero", "params": {}}
        }
    })
}

#[test]
fn malformed_scenarios_exit_with_schema_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let edits: [(&str, fn(&mut Value)); 6] = [
        ("schema", |v| v["schema"] = 2.into()),
        ("dt", |v| v["dt"] = 2.0.into()),
        ("extra", |v| v["extra"] = 1.into()),
        ("no_such_check", |v| v["checks"] = serde_json::json!([{"name": "no_such_check", "params": {}}])),
        ("matrix", |v| v["params"]["a"] = serde_json::json!([[1.0, 0.0]])),
        ("radius", |v| v["initial_body"]["radius"] = (-1.0).into()),
    ];
    let valid = dir.path().join("valid.json");
    fs::write(&valid, valid_scenario().to_string()).unwrap();
    assert!(setflow(&["run", valid.to_str().unwrap(), "--out", out]).status.success());
    for (needle, edit) in edits {
        let mut v = valid_scenario();
        edit(&mut v);
        let path = dir.path().join(format!("{needle}.json"));
        fs::write(&path, v.to_string()).unwrap();
        let o = setflow(&["run", path.to_str().unwrap(), "--out", out]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{needle}: {err}");
        assert!(err.contains(needle), "{needle}: {err}");
    }
    let path = dir.path().join("not_json.json");
    fs::write(&path, "{ nope").unwrap();
    assert_eq!(setflow(&["run", path.to_str().unwrap(), "--out", out]).status.code(), Some(2));
}

#[test]
fn custom_scenario_runs_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shrink.json");
    fs::write(
        &path,
        r#"{"schema": 1, "name": "shrink", "horizon": 1, "dt": 0.01, "grid_size": 128,
            "initial_body": {"kind": "ball", "radius": 2},
            "params": {"a": [[-1,0],[0,-1]], "phi": {"name": "constant", "params": {"value": 1}},
                "source": {"name": "zero", "params": {}}},
            "functionals": [{"name": "perimeter", "params": {}}]}"#,
    )
    .unwrap();
    let o = setflow(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let report = read_report(dir.path(), "shrink");
    assert_eq!(report["frames"], 101);
    let csv = fs::read_to_string(dir.path().join("shrink.csv")).unwrap();
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    // V(t) = V(0) e^{-2t} for u' = -u
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let v = last[header.iter().position(|h| *h == "V").unwrap()];
    let v0 = 4.0 * 128.0 * (std::f64::consts::PI / 128.0).tan();
    assert!((v - v0 * (-2.0f64).exp()).abs() < 1e-6 * v0, "{v}");
}

#[test]
fn geom_commands() {
    let out = |args: &[&str]| {
        let o = setflow(args);
        assert!(o.status.success(), "{args:?}");
        stdout(&o).trim().to_owned()
    };
    let area: f64 = out(&["geom", "area", "rect:2,3"]).parse().unwrap();
    assert!((area - 6.0).abs() < 1e-9);
    let perimeter: f64 = out(&["geom", "perimeter", "square:1+seg:2"]).parse().unwrap();
    assert!((perimeter - 8.0).abs() < 1e-9);
    let mixed: f64 = out(&["geom", "mixed", "rect:2,1", "rot90(rect:2,1)"]).parse().unwrap();
    assert!((mixed - 2.5).abs() < 1e-6);
    let d: f64 = out(&["geom", "hausdorff", "ball:1", "ball:1,3,4"]).parse().unwrap();
    // sup over grid directions: 5 cos(pi/M) at worst
    assert!((d - 5.0).abs() < 2e-6);
    assert_eq!(out(&["geom", "hukuhara", "square:2", "ball:0.5"]), "no difference");
    assert!(out(&["geom", "hukuhara", "square:2+ball:1", "ball:1"]).starts_with("area 4"));
    assert_eq!(setflow(&["geom", "area", "blob:1"]).status.code(), Some(2));
}
