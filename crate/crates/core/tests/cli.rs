use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn bunched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bunched")).args(args).output().unwrap()
}

fn corpus_file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn prove_exit_statuses() {
    let o = bunched(&["prove", "p, p |- p * p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("provable"));
    assert_eq!(bunched(&["prove", "p |- p * p"]).status.code(), Some(1));
    assert_eq!(bunched(&["prove", "--quiet", "p, p, p |- p * p"]).status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(bunched(&["prove", "p |-"]).status.code(), Some(2));
    assert_eq!(bunched(&["prove", "p & |- q"]).status.code(), Some(2));
    assert_eq!(bunched(&[]).status.code(), Some(2));
    assert_eq!(bunched(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bunched(&["corpus", "/nonexistent/corpus.txt"]).status.code(), Some(2));
    let bad = corpus_file("p |- p expect:maybe\n");
    assert_eq!(bunched(&["corpus", bad.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn resource_limit_exits_3() {
    let o = bunched(&["prove", "--max-visited", "1", "(p -> q) & (q -> r) |- (r -> bot) -> (p -> bot)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("resource-limit"));
}

#[test]
fn json_output_parses() {
    let o = bunched(&["prove", "--format", "json", "--stats", "p * q |- q * p"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "provable");
    assert!(v["derivation"].is_object());
    assert!(v["stats"]["nodes_expanded"].as_u64().unwrap() >= 1);
    assert!(v["bounds"].is_object());

    let f = corpus_file("p |- p expect:provable\np |- q expect:unprovable\n");
    let o = bunched(&["corpus", "--format", "json", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn latex_output() {
    let o = bunched(&["prove", "--format", "latex", "p |- p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('\\'));
}

#[test]
fn empty_corpus() {
    let f = corpus_file("# nothing here\n\n");
    let o = bunched(&["corpus", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 sequents"));
}

#[test]
fn expectation_mismatch_exits_1() {
    let f = corpus_file("p |- p expect:unprovable\n");
    let o = bunched(&["corpus", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("1 expectation mismatches"));
}

#[test]
fn contraction_corpus_meets_expectations() {
    let f = corpus_file("p, p |- p * p expect:provable\np |- p * p expect:unprovable\np, p, p |- p * p expect:unprovable\n");
    let o = bunched(&["corpus", "--cross-validate", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn shipped_corpora_meet_expectations() {
    for name in ["acceptance", "ip", "mill", "dfl", "non_theorems"] {
        let path = format!("{}/corpus/{name}.txt", env!("CARGO_MANIFEST_DIR"));
        let o = bunched(&["corpus", "--cross-validate", "--depth", "12", &path]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("0 expectation mismatches, 0 oracle disagreements"));
    }
}
