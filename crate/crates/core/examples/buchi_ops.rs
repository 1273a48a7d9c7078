//! Intersection, complement and difference of Büchi automata, with lasso
//! extraction.

use hytsl::buchi::{complement, difference, BuchiAutomaton, DEFAULT_COMPLEMENT_BUDGET};

fn main() {
    // infinitely many a
    let mut inf_a = BuchiAutomaton::new("wait", false);
    let seen = inf_a.add_state("seen", true);
    for q in [0, seen] {
        inf_a.add_transition(q, 'a', seen, ());
        inf_a.add_transition(q, 'b', 0, ());
    }
    // finitely many b
    let mut fin_b = BuchiAutomaton::new("any", false);
    let done = fin_b.add_state("done", true);
    fin_b.add_transition(0, 'a', 0, ());
    fin_b.add_transition(0, 'b', 0, ());
    fin_b.add_transition(0, 'a', done, ());
    fin_b.add_transition(done, 'a', done, ());

    let alphabet = ['a', 'b'];
    let not_inf_a = complement(&inf_a, &alphabet, DEFAULT_COMPLEMENT_BUDGET).unwrap();
    let l = not_inf_a.find_lasso().unwrap();
    println!("complement of GF a: {} states, accepts {:?} ({:?})^ω", not_inf_a.num_states(), l.stem, l.cycle);
    println!("GF a and not GF a: empty = {}", inf_a.intersect(&not_inf_a).is_empty());

    let diff = difference(&inf_a, &fin_b, DEFAULT_COMPLEMENT_BUDGET).unwrap();
    let l = diff.find_lasso().unwrap();
    println!("GF a minus FG a: {:?} ({:?})^ω", l.stem, l.cycle);
    println!("difference: {} states after trimming", diff.trim().num_states());
}
