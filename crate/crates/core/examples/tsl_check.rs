//! Plain TSL(T): properties of a single counter.

use hytsl::checker::{check, CheckOptions};
use hytsl::feasibility::BuiltinSolver;
use hytsl::logic::parse_formula;
use hytsl::program::parse_program_automaton;

const COUNTER: &str = "cells: n
state q0 initial accepting
state q1 accepting
trans q0 -> q1 : n := 1
trans q1 -> q1 : n := n - 1
";

fn main() {
    let p = parse_program_automaton(COUNTER).unwrap();
    for text in ["X G (n <= 0)", "G (n > -2)", "X X G [n <- n - 1]"] {
        let f = parse_formula(text).unwrap();
        let v = check(&p, &f, &CheckOptions::default(), &BuiltinSolver::default()).unwrap();
        println!("{text}: {}", v.outcome);
    }
}
