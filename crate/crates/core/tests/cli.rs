use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value as Json;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn hytsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hytsl"))
        .args(args)
        .env_remove("HYTSL_SOLVER_CMD")
        .output()
        .unwrap()
}

fn check(system: &str, formula: &str, extra: &[&str]) -> Output {
    let sys = data(system);
    let f = data(formula);
    let formula = if f.is_file() { f.to_str().unwrap().to_string() } else { formula.to_string() };
    let mut args = vec!["check", "--system", sys.to_str().unwrap(), "--formula", &formula];
    args.extend_from_slice(extra);
    hytsl(&args)
}

fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn report(out: &Output) -> Json {
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report does not match the schema: {msgs:?}");
    }
    v
}

/// Transition lines of a DOT file; panics unless the file is a single digraph.
fn dot_edges(text: &str) -> usize {
    let t = text.trim();
    assert!(t.starts_with("digraph"), "{t}");
    assert!(t.ends_with('}'));
    assert_eq!(t.matches('{').count(), t.matches('}').count());
    t.lines().filter(|l| l.contains("->") && !l.contains("__start")).count()
}

#[test]
fn exit_codes_of_the_examples() {
    let gni = check("gni.pa", "gni.htsl", &["--k", "1"]);
    assert_eq!(gni.status.code(), Some(1), "{}", String::from_utf8_lossy(&gni.stderr));
    assert!(String::from_utf8_lossy(&gni.stdout).contains("violated"));

    let cycle = check("cycle.pa", "cycle.htsl", &["--k", "1", "--cycle-iters", "1"]);
    assert_eq!(cycle.status.code(), Some(1));

    let none = check("gni.pa", "exists pi. G false", &[]);
    assert_eq!(none.status.code(), Some(0));

    let witness = check("gni.pa", "exists pi. F (c[pi] = 1)", &[]);
    assert_eq!(witness.status.code(), Some(2));

    let holds = check("gni.pa", "forall pi. G (c[pi] = 0 || c[pi] = 1)", &[]);
    assert_eq!(holds.status.code(), Some(0));
}

#[test]
fn json_reports_match_the_schema() {
    let out = check("gni.pa", "gni.htsl", &["--format", "json"]);
    let v = report(&out);
    assert_eq!(v["outcome"], "violated");
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["procedure"], "forall-exists");
    assert_eq!(v["partner_check"]["confirmed"], true);

    let out = check("cycle.pa", "cycle.htsl", &["--format", "json", "--cycle-iters", "1"]);
    let v = report(&out);
    assert_eq!(v["outcome"], "violated");
    assert!(!v["cycles"].as_array().unwrap().is_empty());

    for formula in ["exists pi. G false", "exists pi. F (c[pi] = 1)", "G !(c = 1)"] {
        report(&check("gni.pa", formula, &["--format", "json"]));
    }
}

#[test]
fn dumps_are_valid_dot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = check("gni.pa", "gni.htsl", &["--dump", "product", "--dump", "projected", "--dump-dir", d]);
    assert_eq!(out.status.code(), Some(1));
    let product = std::fs::read_to_string(dir.path().join("product.dot")).unwrap();
    assert_eq!(dot_edges(&product), 8);
    let projected = std::fs::read_to_string(dir.path().join("projected.dot")).unwrap();
    assert!(dot_edges(&projected) > 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrote"));

    let out = check("gni.pa", "gni.htsl", &["--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.matches("digraph").count() >= 5);
}

#[test]
fn empty_automaton_dumps_without_edges() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("stuck.pa");
    std::fs::write(&sys, "cells: c\nstate q0 initial accepting\n").unwrap();
    let out = hytsl(&[
        "check",
        "--system",
        sys.to_str().unwrap(),
        "--formula",
        "forall pi. G (c[pi] = 0)",
        "--dump",
        "product",
        "--dump-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let product = std::fs::read_to_string(dir.path().join("product.dot")).unwrap();
    assert_eq!(dot_edges(&product), 0);
}

#[test]
fn solver_env_overrides_the_flag() {
    let sys = data("gni.pa");
    let f = data("gni.htsl");
    let args = [
        "check",
        "--system",
        sys.to_str().unwrap(),
        "--formula",
        f.to_str().unwrap(),
        "--solver-cmd",
        "/nonexistent/solver",
        "--format",
        "json",
    ];
    let broken = hytsl(&args);
    assert_ne!(broken.status.code(), Some(1));

    let bogus = Command::new(env!("CARGO_BIN_EXE_hytsl"))
        .args(args)
        .env("HYTSL_SOLVER_CMD", "/nonexistent/other-solver")
        .output()
        .unwrap();
    let v: Option<Json> = serde_json::from_slice(&bogus.stdout).ok();
    if let Some(v) = v {
        assert!(v["solver"]["name"].as_str().unwrap().contains("other-solver"), "{v}");
    }

    if Command::new("z3").arg("-version").output().is_ok() {
        let ok = Command::new(env!("CARGO_BIN_EXE_hytsl"))
            .args(args)
            .env("HYTSL_SOLVER_CMD", "z3 -in")
            .output()
            .unwrap();
        assert_eq!(ok.status.code(), Some(1));
    }
}

#[test]
fn bad_invocations_exit_with_three() {
    assert_eq!(hytsl(&[]).status.code(), Some(3));
    assert_eq!(hytsl(&["check"]).status.code(), Some(3));
    assert_eq!(hytsl(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(check("gni.pa", "gni.htsl", &["--k", "0"]).status.code(), Some(3));
    assert_eq!(check("gni.pa", "gni.htsl", &["--dump", "nowhere"]).status.code(), Some(3));
    assert_eq!(check("gni.pa", "forall pi. G (", &[]).status.code(), Some(3));
    assert_eq!(check("missing.pa", "gni.htsl", &[]).status.code(), Some(3));
    assert_eq!(check("gni.pa", "gni.htsl", &["--complement-budget", "3"]).status.code(), Some(3));
    assert_eq!(hytsl(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for format in ["text", "json", "dot"] {
        let a = check("cycle.pa", "cycle.htsl", &["--format", format]);
        let b = check("cycle.pa", "cycle.htsl", &["--format", format]);
        assert_eq!(a.stdout, b.stdout, "{format}");
        assert!(!a.stdout.is_empty());
    }
}
