mod common;

use std::collections::BTreeSet;

use common::suites::{self, audit, cases, run_case};
use common::*;
use hytsl::checker::{check, CheckError, CheckOptions, Outcome, Stage};
use hytsl::feasibility::BuiltinSolver;
use hytsl::logic::parse_formula;
use hytsl::program::parse_program_automaton;

#[test]
fn gni_is_violated() {
    suites::gni().unwrap();
}

#[test]
fn cycle_example_needs_cycle_removal() {
    suites::cycle_example().unwrap();
}

#[test]
fn small_cases() {
    for c in cases() {
        let (p, v) = run_case(&c);
        assert_eq!(v.outcome, c.expect, "{}: {}", c.name, v.to_text());
        audit(&p, &v).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    }
}

#[test]
fn reported_verdicts_replay() {
    suites::soundness().unwrap();
}

fn gni_with_dumps(formula: &str) -> hytsl::checker::Verdict {
    let p = parse_program_automaton(&data("gni.pa")).unwrap();
    let f = parse_formula(formula).unwrap();
    let opts = CheckOptions {
        cycle_iters: 0,
        dump: Stage::ALL.into_iter().collect(),
        ..CheckOptions::default()
    };
    check(&p, &f, &opts, &BuiltinSolver::default()).unwrap()
}

fn dot_of(v: &hytsl::checker::Verdict, stage: Stage) -> &str {
    &v.dumps.iter().find(|(s, _)| *s == stage).unwrap().1
}

fn edges(dot: &str) -> Vec<&str> {
    dot.lines().filter(|l| l.contains("->") && !l.contains("__start")).collect()
}

#[test]
fn gni_product_and_projection_shapes() {
    let v = gni_with_dumps(&data("gni.htsl"));
    // the product: four branches out of q0q0 and one edge back from each
    let product = dot_of(&v, Stage::Product);
    assert_eq!(edges(product).len(), 8);
    for q in ["q0q0", "q1q1", "q1q2", "q2q1", "q2q2"] {
        assert!(product.contains(&format!("label=\"{q}")), "{q}");
    }
    assert!(edges(product).iter().all(|e| e.contains("i[pi2] := *") || e.contains("i[pi] := *")));
    // the projection keeps the loop through q2q2 with the universal trace's statements
    let projected = dot_of(&v, Stage::Projected);
    let e = edges(projected);
    assert_eq!(e.len(), 2, "{projected}");
    assert!(e.iter().any(|l| l.contains("assert(i[pi] >= 0)")));
    assert!(e.iter().any(|l| l.contains("c[pi] := 1")));
    assert!(!projected.contains("pi2"));
}

#[test]
fn every_stage_is_dumped_for_forall_exists() {
    let v = gni_with_dumps(&data("gni.htsl"));
    let got: BTreeSet<Stage> = v.dumps.iter().map(|(s, _)| *s).collect();
    assert_eq!(got, Stage::ALL.into_iter().collect());
    for (_, d) in &v.dumps {
        assert!(d.starts_with("digraph") && d.trim_end().ends_with('}'));
    }
}

#[test]
fn reports_are_deterministic() {
    let a = gni_with_dumps(&data("gni.htsl"));
    let b = gni_with_dumps(&data("gni.htsl"));
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.dumps, b.dumps);
}

#[test]
fn formula_errors() {
    let p = parse_program_automaton(&data("gni.pa")).unwrap();
    let run = |f: &str| check(&p, &parse_formula(f).unwrap(), &CheckOptions::default(), &BuiltinSolver::default());
    assert!(matches!(run("G (x = 0)"), Err(CheckError::Undeclared(_))));
    assert!(parse_formula("forall pi. G (c = 0)").is_err());
    assert!(parse_formula("G (c[pi] = 0)").is_err());
    assert!(matches!(run("G [i <- 1]"), Err(CheckError::InputUpdate(_))));
    assert!(matches!(
        run("exists pi. forall pi2. G (c[pi] = c[pi2])"),
        Err(CheckError::Prefix(_))
    ));
}

#[test]
fn tiny_budget_is_reported() {
    let p = parse_program_automaton(&data("cycle.pa")).unwrap();
    let f = parse_formula(&data("cycle.htsl")).unwrap();
    let opts = CheckOptions {
        complement_budget: 3,
        ..CheckOptions::default()
    };
    let v = check(&p, &f, &opts, &BuiltinSolver::default()).unwrap();
    assert_eq!(v.outcome, Outcome::ResourceExceeded);
    assert_eq!(v.outcome.exit_code(), 3);
}
