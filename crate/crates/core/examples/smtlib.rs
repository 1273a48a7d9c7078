//! The SMT-LIB script of a window query, and its answer from the built-in
//! solver or from an external one given on the command line (`z3 -in`).

use std::collections::BTreeSet;
use std::time::Duration;

use hytsl::feasibility::{encode_window, script, BuiltinSolver, Init, SmtLibSolver, Solver};
use hytsl::program::{parse_statement, Universe};
use hytsl::terms::{Assignment, Ident};

fn main() {
    let n = Ident::cell("n");
    let u = Universe {
        framed: BTreeSet::from([n.clone()]),
        inputs: BTreeSet::new(),
        initial: Assignment::zeros(&[n]),
    };
    let window: Vec<_> = ["n := 1", "n := n - 1", "n := n - 1", "assert(n >= 0)"]
        .iter()
        .map(|s| parse_statement(s, &BTreeSet::new()).unwrap())
        .collect();
    let q = encode_window(&u, &window, Init::Free);
    print!("{}", script(&q));
    let solver: Box<dyn Solver> = match std::env::args().nth(1) {
        Some(cmd) => Box::new(SmtLibSolver::new(&cmd, Duration::from_secs(10))),
        None => Box::new(BuiltinSolver::default()),
    };
    println!("; {:?}", solver.check(&q));
}
