//! Generalized noninterference on the two-branch system: a ∀∃ formula that
//! the system violates.

use hytsl::checker::{check, CheckOptions};
use hytsl::feasibility::BuiltinSolver;
use hytsl::logic::parse_formula;
use hytsl::program::parse_program_automaton;

fn main() {
    let p = parse_program_automaton(include_str!("../data/gni.pa")).unwrap();
    let f = parse_formula(include_str!("../data/gni.htsl")).unwrap();
    let opts = CheckOptions {
        k: 1,
        cycle_iters: 0,
        ..CheckOptions::default()
    };
    let v = check(&p, &f, &opts, &BuiltinSolver::default()).unwrap();
    print!("{}", v.to_text());
}
