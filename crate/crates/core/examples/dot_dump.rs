//! Writes the automaton of every pipeline stage as Graphviz DOT.

use std::path::PathBuf;

use hytsl::checker::{check, CheckOptions, Stage};
use hytsl::feasibility::BuiltinSolver;
use hytsl::logic::parse_formula;
use hytsl::program::parse_program_automaton;

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hytsl-dot"));
    std::fs::create_dir_all(&dir).unwrap();
    let p = parse_program_automaton(include_str!("../data/gni.pa")).unwrap();
    let f = parse_formula(include_str!("../data/gni.htsl")).unwrap();
    let opts = CheckOptions {
        dump: Stage::ALL.into_iter().collect(),
        ..CheckOptions::default()
    };
    let v = check(&p, &f, &opts, &BuiltinSolver::default()).unwrap();
    for (stage, dot) in &v.dumps {
        let path = dir.join(format!("{}.dot", stage.name()));
        std::fs::write(&path, dot).unwrap();
        println!("{}", path.display());
    }
}
