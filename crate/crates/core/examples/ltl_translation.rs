//! From a TSL formula to its LTL skeleton over atom indices and on to a
//! Büchi automaton over valuations.

use hytsl::logic::{ltl_skeleton, parse_formula};
use hytsl::ltl::translate;

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "G (n <= 0 || X [n <- n - 1])".to_string());
    let f = parse_formula(&text).unwrap();
    let (ltl, atoms) = ltl_skeleton(&f.core);
    for (i, p) in atoms.predicates.iter().enumerate() {
        println!("a{i} = {p}");
    }
    for (j, u) in atoms.updates.iter().enumerate() {
        println!("a{} = {u}", atoms.predicates.len() + j);
    }
    println!("skeleton: {ltl}");
    let a = translate(&ltl, atoms.predicates.len() + atoms.updates.len());
    println!("{} states, {} transitions", a.num_states(), a.transitions().len());
    if let Some(l) = a.find_lasso() {
        println!("accepted: {:?} ({:?})^ω", l.stem, l.cycle);
    }
}
