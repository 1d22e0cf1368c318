use std::path::Path;
use std::process::{Command, Output};

fn cuspbend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspbend")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = cuspbend(&["verify", "--seed", "7"]);
    let b = cuspbend(&["verify", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 5);
}

#[test]
fn suite_filter() {
    let out = cuspbend(&["verify", "--suite", "hilbert"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["name"], "hilbert");
}

#[test]
fn perturbation_fails_with_exit_one() {
    let out = cuspbend(&["verify", "--suite", "cusp_models", "--perturb"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cuspbend(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(cuspbend(&["sweep", "--grid", "2:1:3"]).status.code(), Some(2));
    assert_eq!(cuspbend(&["classify", "/no/such/file.json"]).status.code(), Some(2));
    let out = cuspbend(&["sweep", "--out", "/no/such/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let svg = dir.path().join("a.svg");
    let out = cuspbend(&["sweep", "--grid", "0:2:11", "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().nth(1).unwrap().ends_with(",inf,0.0000000000000000e0,0"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let again = cuspbend(&["sweep", "--grid", "0:2:11"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn bend_classify_and_hilbert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rep = r#"{
        "rep": {"n": 2, "generators": {"a": [[1,1,0.5],[0,1,1],[0,0,1]], "b": [[1,0,0],[0,1,0],[0,0,1]]}},
        "moves": [{"kind": "amalgam", "side1": ["a"], "side2": ["b"], "edge_words": [], "centralizer": [[1,0,0],[0,2,0],[0,0,1]]}]
    }"#;
    let out = cuspbend(&["--exact", "bend", &write(dir.path(), "bend.json", rep)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bent: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(bent["generators"]["b"][1][1], "1/1");

    let data = r#"{"n": 3, "b": [1, 2], "s": [0.6931471805599453, 0]}"#;
    let out = cuspbend(&["classify", &write(dir.path(), "data.json", data)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["type"], 1);

    let pairs = r#"{"domain": {"kind": "cusp", "psi": [1, 0]}, "pairs": [[[1, 1, 1], [2, 0.5, 1]]]}"#;
    let out = cuspbend(&["hilbert", &write(dir.path(), "pairs.json", pairs)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,d"));
    assert_eq!(text.lines().count(), 2);
}
