use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn elimkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elimkit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const GSP4_MEMBER: &str = r#"{"field": {"p": 7}, "rows": [[3,1,0,0],[0,1,0,0],[0,0,5,0],[0,0,2,1]]}"#;

#[test]
fn zcount_fq_row_ends_with_1784() {
    let o = elimkit(&["zcount", "--series", "fq", "--terms", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().last().unwrap();
    assert_eq!(row, "row: 1,4,8,22,42,103,199,441,859,1784");

    let o = elimkit(&["zcount", "--series", "real", "--terms", "10", "--emit", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["coefficients"][9], 1367);
}

#[test]
fn decompose_then_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", GSP4_MEMBER);
    let word = dir.path().join("word.txt");
    let word = word.to_str().unwrap();
    let o = elimkit(&["decompose", "--kind", "gsp", "--l", "2", "--field", "p=7", "--in", &g, "--out", word]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = elimkit(&["verify", "--in", &g, "--word", word]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));

    // A different matrix does not verify against the same word.
    let other = write(dir.path(), "h.json", r#"{"field": {"p": 7}, "rows": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#);
    let o = elimkit(&["verify", "--in", &other, "--word", word]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decompose_non_member_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"field": {"p": 7}, "rows": [[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#);
    let o = elimkit(&["decompose", "--kind", "gsp", "--l", "2", "--field", "p=7", "--in", &g]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_input_errors_exit_1() {
    assert_eq!(elimkit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(elimkit(&["zcount"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let o = elimkit(&["decompose", "--kind", "gsp", "--l", "2", "--in", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    let o = elimkit(&["decompose", "--kind", "gsp", "--l", "2", "--in", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zbrute_reports_and_cap() {
    let o = elimkit(&["zbrute", "--kind", "u", "--n", "3", "--q", "2", "--emit", "json", "--jobs", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 648);
    assert_eq!(v["z_count"], 7);
    let o = elimkit(&["zbrute", "--kind", "gl", "--n", "4", "--q", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn spinor_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    // diag(1, 3, 1, 1/3) in O(4, 7): spinor norm class(3), a non-residue.
    let g = write(dir.path(), "g.json", r#"{"field": {"p": 7}, "rows": [[1,0,0,0],[0,3,0,0],[0,0,1,0],[0,0,0,5]]}"#);
    let o = elimkit(&["spinor", "--kind", "o-even", "--l", "2", "--in", &g, "--method", "all", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["elim"], v["wall"]);
    assert_eq!(v["elim"], "nonresidue");
}

#[test]
fn polys_degree_one_count() {
    let o = elimkit(&["polys", "--q", "3", "--dmax", "4", "--self-u", "--emit", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counts"][0]["count"], 4);
    assert_eq!(v["counts"][1]["count"], 0);
    assert_eq!(v["counts"][3]["count"], 0);
}

#[test]
fn bench_is_csv_and_seeded_output_is_deterministic() {
    let args = ["bench", "--kind", "go-odd", "--l", "2", "--field", "p=5", "--words", "5", "--seed", "9"];
    let o = elimkit(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("kind,size,field,words,total_ms"));
    assert!(lines.next().unwrap().starts_with("go-odd,2,"));

    let a = elimkit(&["zbrute", "--kind", "gl", "--n", "3", "--q", "2", "--emit", "json"]);
    let b = elimkit(&["zbrute", "--kind", "gl", "--n", "3", "--q", "2", "--emit", "json", "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
}
