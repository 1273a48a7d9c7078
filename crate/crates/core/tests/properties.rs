mod common;

use common::suites;

#[test]
fn k_feasible_traces_are_exactly_accepted() {
    suites::k_feasibility(200).unwrap();
}

#[test]
fn automata_operations_match_set_semantics() {
    suites::buchi_algebra(200).unwrap();
}

#[test]
fn tsl_evaluation_agrees_with_ltl_on_letters() {
    suites::lemma_one(500).unwrap();
}
