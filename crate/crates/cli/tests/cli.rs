use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabgw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn envelope_and_exit_codes() {
    let out = run(&["gw", "sphere", "--genus", "3", "--degree", "1", "--insertions", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["ok"], true);
    assert_eq!(v["command"], "gw sphere");
    assert_eq!(v["result"]["value"], "8");

    let out = run(&["gw", "sphere", "--genus", "0", "--degree", "1", "--insertions", "h,h"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["kind"], "gw");

    let out = run(&["pipeline", "smith", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "pipeline");

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "usage");

    let out = run(&["gw", "table", "--max-genus", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_carry_positions() {
    let out = run(&["gw", "solve", "-e", "int c", "-e", "2*c = = 1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "input");
    assert_eq!(v["error"]["line"], 3);
    assert_eq!(v["error"]["column"], 7);

    let out = run(&["chern", "fingerprint", "--preset", "S2xS2", "--c1", "2*u1 + 2*w"]);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "ring");
    assert!(v["error"]["position"].is_number());
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["pipeline", "lemma57"][..],
        &["polytope", "facets", "--preset", "borromean"],
        &["pipeline", "soundness", "--samples", "200", "--bound", "2", "--seed", "5"],
        &["gw", "table", "--format", "tsv"],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn class_expressions() {
    let out = run(&[
        "orbit", "check", "--preset", "S2xS2", "--v0", "2*u1+2*u2", "--v1", "u1+4*u2",
    ]);
    let v = json(&out);
    assert_eq!(v["result"]["v0"], serde_json::json!([2, 2]));
    assert_eq!(v["result"]["report"]["verdict"], "distinct");

    let out = run(&["chern", "stabilize", "--preset", "S2xS2", "--c1", "2*u1+2*u2", "--by", "cp3"]);
    let v = json(&out);
    assert_eq!(v["result"]["c1"], "4*h + 2*u1 + 2*u2");

    let out = run(&["chern", "fibre-sum", "--summands", "T4 + 3*E1"]);
    assert_eq!(json(&out)["result"]["sigma"], -24);

    let out = run(&["gw", "sphere", "--genus", "0", "--degree", "0", "--insertions", "h*h,1,1"]);
    assert_eq!(json(&out)["result"]["insertions"][0], "0");
}

#[test]
fn tsv_flattens_paths() {
    let out = run(&["chern", "p1", "--sigma", "-8", "--format", "tsv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().collect::<Vec<_>>(),
        vec!["path\tvalue", "k\t1", "name\tX", "p1_number\t-24", "sigma\t-8"]
    );
}
