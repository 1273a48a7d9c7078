//! Evaluating a TSL formula on an ultimately periodic computation, and the
//! letters it induces over the formula's atoms.

use hytsl::logic::{eval_tsl, parse_formula, seq_of};
use hytsl::terms::{Assignment, Computation, Ident, Value};

fn state(n: i64) -> Assignment {
    Assignment::new().with(Ident::cell("n"), Value::int(n))
}

fn main() {
    // 3 2 1 0 0 0 ...
    let z = Computation::new(state(3), vec![state(2), state(1)], vec![state(0)]);
    let f = parse_formula("[n <- n - 1] U (n = 0)").unwrap();
    let (stem, cycle) = seq_of(&z, &f.atoms()).unwrap();
    println!("letters: {stem:?} ({cycle:?})^ω");
    for t in 0..4 {
        println!("t = {t}: {}", eval_tsl(&f.core, &z, t).unwrap());
    }
}
