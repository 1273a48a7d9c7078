//! Removing k-infeasible traces from a program automaton.

use hytsl::feasibility::{remove_k_infeasibility, BuiltinSolver};
use hytsl::program::parse_program_automaton;

const SYSTEM: &str = "cells: n
state q0 initial accepting
state q1 accepting
trans q0 -> q1 : n := 1
trans q1 -> q1 : n := n - 1; assert(n >= 0)
trans q1 -> q0 : assert(n < 0)
";

fn main() {
    let p = parse_program_automaton(SYSTEM).unwrap();
    let s = BuiltinSolver::default();
    for k in 1..=3 {
        let pk = remove_k_infeasibility(&p, k, &s, 10_000).unwrap();
        let a = pk.automaton.trim();
        println!("k = {k}: {} states, {} transitions", a.num_states(), a.transitions().len());
        print!("{a}");
    }
}
