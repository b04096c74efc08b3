//! End-to-end tests of the `pcm-conley` binary.

use std::path::Path;
use std::process::{Command, Output};

use pcm_conley::fixtures;
use pcm_conley::mapfile::serialize_map;

const REMARK: &str = r#"{
  "name": "remark",
  "space": { "lo": "0", "hi": "1" },
  "pieces": [
    { "lo": "0", "hi": "1/2", "lo_closed": true, "hi_closed": false, "a": "1", "b": "0" },
    { "lo": "1/2", "hi": "1", "lo_closed": true, "hi_closed": true, "a": "1/2", "b": "1/2" }
  ]
}
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcm-conley")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_accepts_a_good_map() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", REMARK);
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("valid: true"));
}

#[test]
fn validate_lists_overlapping_pieces() {
    let dir = tempfile::tempdir().unwrap();
    let text = REMARK.replace(r#""lo": "1/2", "hi": "1", "lo_closed": true"#, r#""lo": "2/5", "hi": "1", "lo_closed": true"#);
    let f = write(dir.path(), "overlap.json", &text);
    let o = run(&["validate", &f, "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn parse_error_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = REMARK.replace(r#""a": "1/2""#, r#""a": "one half""#);
    let f = write(dir.path(), "bad.json", &text);
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("pieces[1].a"), "{err}");
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn index_on_remark_map_certifies_isolation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", REMARK);
    let o = run(&["index", &f, "--neighborhood", "0,3/5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "index");
    assert_eq!(v["isolation"]["status"], "certified");
    assert_eq!(v["outcome"]["status"], "success");
    assert_eq!(v["class"]["trivial"], false);
}

#[test]
fn missing_neighborhood_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", REMARK);
    let o = run(&["index", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--neighborhood"));
}

#[test]
fn paper_example_json_is_deterministic() {
    let a = run(&["paper-example", "--format", "json", "--no-stability-probe"]);
    let b = run(&["paper-example", "--format", "json", "--no-stability-probe"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["schema"], pcm_conley::report::SCHEMA_VERSION);
    assert_eq!(v["outcome"]["kind"], "map-orbit");
}

#[test]
fn serialized_fixture_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", &serialize_map(&fixtures::remark_map()).unwrap());
    let g = write(dir.path(), "remark2.json", REMARK);
    let args = |p: &str| run(&["wazewski", p, "--neighborhood", "0,3/5", "--format", "json"]);
    let (a, b) = (args(&f), args(&g));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn emits_dot_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", REMARK);
    let dot = dir.path().join("g.dot");
    let csv = dir.path().join("g.csv");
    let o = run(&[
        "isolate",
        &f,
        "--neighborhood",
        "0,3/5",
        "--emit-dot",
        dot.to_str().unwrap(),
        "--emit-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);
}

#[test]
fn code_command_prints_itinerary() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "remark.json", REMARK);
    let o = run(&["code", &f, "--point", "1/4", "--code-depth", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "code");
    assert_eq!(v["word"], serde_json::json!([0, 0, 0]));
    let o = run(&["code", &f, "--point", "1/2", "--selector", "1/2->0", "--code-depth", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
