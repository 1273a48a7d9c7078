//! Proving loops infeasible with affine ranking functions.

use std::collections::BTreeSet;

use hytsl::feasibility::{cycle_infeasible, BuiltinSolver};
use hytsl::program::{parse_statement, Statement, Universe};
use hytsl::terms::{Assignment, Ident};

fn counter() -> Universe {
    let n = Ident::cell("n");
    Universe {
        framed: BTreeSet::from([n.clone()]),
        inputs: BTreeSet::new(),
        initial: Assignment::zeros(&[n]),
    }
}

fn st(s: &str) -> Statement {
    parse_statement(s, &BTreeSet::new()).unwrap()
}

fn main() {
    let s = BuiltinSolver::default();
    let u = counter();
    let countdown = [st("n--"), st("assert(n >= 0)")];
    println!("{} | {}: {}", countdown[0], countdown[1], cycle_infeasible(&u, &countdown, &s));

    let two = counter().on_trace("pi").union(&counter().on_trace("pi2"));
    let race = [Statement::sequence(vec![
        st("n--").on_trace("pi"),
        st("n := n - 2").on_trace("pi2"),
        st("assert(n[pi] < n[pi2])"),
    ])];
    println!("{}: {}", race[0], cycle_infeasible(&two, &race, &s));

    let forever = [st("n := n + 1")];
    println!("{}: {}", forever[0], cycle_infeasible(&u, &forever, &s));
}
