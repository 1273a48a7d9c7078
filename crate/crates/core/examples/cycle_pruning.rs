//! The countdown example: k-pruning alone finds no violation, one round of
//! infeasible-cycle removal exposes one.

use hytsl::checker::{check, CheckOptions};
use hytsl::feasibility::BuiltinSolver;
use hytsl::logic::parse_formula;
use hytsl::program::parse_program_automaton;

fn main() {
    let p = parse_program_automaton(include_str!("../data/cycle.pa")).unwrap();
    let f = parse_formula(include_str!("../data/cycle.htsl")).unwrap();
    for cycle_iters in [0, 1] {
        let opts = CheckOptions {
            k: 1,
            cycle_iters,
            ..CheckOptions::default()
        };
        let v = check(&p, &f, &opts, &BuiltinSolver::default()).unwrap();
        println!("k' = {cycle_iters}: {}", v.outcome);
        for c in &v.cycles {
            let labels: Vec<String> = c.labels.iter().map(|s| s.to_string()).collect();
            println!("  removed ({})^ω", labels.join(" | "));
        }
    }
}
