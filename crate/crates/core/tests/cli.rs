//! Runs the built binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use monogenic::certs::CayleyTable;
use monogenic::{instantiate_family, Family, Params};
use serde_json::Value;

fn monogenic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogenic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn output_is_deterministic_across_runs_and_threads() {
    let args = ["classify", "--copies", "2", "--exp-bound", "4", "--json"];
    let first = monogenic(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(monogenic(&args).stdout, first.stdout);

    let one = monogenic(&["classify", "--copies", "2", "--exp-bound", "4", "--threads", "1", "--json"]);
    let four = monogenic(&["classify", "--copies", "2", "--exp-bound", "4", "--threads", "4", "--json"]);
    let (one, four) = (json(&one), json(&four));
    assert_eq!(one["result"], four["result"]);
    assert_eq!(one["result"], json(&first)["result"]);
}

#[test]
fn two_copy_classification_lists_both_families() {
    let out = monogenic(&["classify", "--copies", "2", "--exp-bound", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["version"], 1);
    let text = v["result"].to_string();
    assert!(text.contains("\"2-i\""));
    assert!(text.contains("\"2-ii\""));
}

#[test]
fn constraint_violation_is_a_usage_error() {
    let out = monogenic(&["verify", "--family", "3-i", "--params", "i=1,j=1,k=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("i+j=k+2"));
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = monogenic(&["verify", "--family", "3-x", "--params", "i=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_table_file_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = CayleyTable::fixture(Family::ThreeII).unwrap();
    table.set(1, 2, 0).unwrap();
    let file = dir.path().join("table.txt");
    std::fs::write(&file, table.render()).unwrap();

    let args = ["verify", "--family", "3-ii", "--params", "i=1,j=1,k=1"];
    assert_eq!(monogenic(&args).status.code(), Some(0));
    let out = monogenic(&[&args[..], &["--table", path(&file)]].concat());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn consequence_from_a_presentation_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = Params::parse("i=2,j=2,k=2").unwrap();
    let p = instantiate_family(Family::ThreeI, &params).unwrap();
    let file = dir.path().join("three_i.txt");
    std::fs::write(&file, p.render()).unwrap();

    let out = monogenic(&["consequence", "--presentation", path(&file), "--from", "abca", "--to", "a^4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["consequence"]["verdict"], "derivable");

    let out = monogenic(&["consequence", "--presentation", path(&file), "--from", "a", "--to", "b"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ball_counts_classes() {
    let out = monogenic(&["ball", "--family", "3-i", "--params", "i=2,j=2,k=2", "--length", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["class_count"], 12);
}

#[test]
fn orbits_and_normalize() {
    let out = monogenic(&["orbits", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["orbit_count"], 74);

    let out = monogenic(&["normalize", "--type", "bacacb", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["canonical"], "abacbc");
}

#[test]
fn help_exits_zero() {
    let out = monogenic(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("classify"));
}
