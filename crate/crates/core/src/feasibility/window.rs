//! k-feasibility: pruning transitions whose last `k` statements cannot run
//! in sequence from any state.

use std::collections::{HashMap, VecDeque};

use crate::buchi::{BuchiAutomaton, BuchiError, StateId};
use crate::program::{ProgramAutomaton, Statement, Universe};

use super::encode::{encode_window, Init};
use super::smt::Solver;

/// Whether the statements can execute consecutively from some state.
/// Unknown solver answers count as feasible.
pub fn k_window_feasible(u: &Universe, window: &[Statement], solver: &dyn Solver) -> bool {
    !solver.check(&encode_window(u, window, Init::Free)).is_unsat()
}

/// The automaton `P_k` whose traces are exactly the k-feasible traces of `p`.
///
/// A state remembers the last `k - 1` transitions taken (fewer near the
/// initial state); a transition is kept when the window it closes is
/// feasible. Tags are carried over. `budget` bounds the number of states.
pub fn remove_k_infeasibility<T: Clone>(
    p: &ProgramAutomaton<T>,
    k: usize,
    solver: &dyn Solver,
    budget: usize,
) -> Result<ProgramAutomaton<T>, BuchiError> {
    if k == 0 {
        return Ok(p.clone());
    }
    let a = &p.automaton;
    let name = |q: StateId, path: &[usize]| -> String {
        if k == 1 {
            return a.name(q).to_string();
        }
        let mut s = match path.first() {
            Some(&i) => a.name(a.transition(i).from).to_string(),
            None => a.name(q).to_string(),
        };
        for &i in path {
            s.push('>');
            s.push_str(a.name(a.transition(i).to));
        }
        s
    };
    type Key = (StateId, Vec<usize>);
    let start: Key = (a.initial(), Vec::new());
    let mut out = BuchiAutomaton::new(name(start.0, &start.1), a.is_accepting(start.0));
    let mut ids: HashMap<Key, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut work = VecDeque::from([start]);
    while let Some((q, path)) = work.pop_front() {
        let src = ids[&(q, path.clone())];
        for &e in a.outgoing(q) {
            let mut window = path.clone();
            window.push(e);
            let ok = *memo.entry(window.clone()).or_insert_with(|| {
                let stmts: Vec<Statement> =
                    window.iter().map(|&i| a.transition(i).label.clone()).collect();
                k_window_feasible(&p.universe, &stmts, solver)
            });
            if !ok {
                continue;
            }
            let t = a.transition(e);
            let keep = window.len().min(k - 1);
            let key: Key = (t.to, window[window.len() - keep..].to_vec());
            let dst = match ids.get(&key) {
                Some(&d) => d,
                None => {
                    if out.num_states() >= budget {
                        return Err(BuchiError::BudgetExceeded(out.num_states()));
                    }
                    let d = out.add_state(name(key.0, &key.1), a.is_accepting(t.to));
                    ids.insert(key.clone(), d);
                    work.push_back(key);
                    d
                }
            };
            out.add_transition(src, t.label.clone(), dst, t.tag.clone());
        }
    }
    Ok(p.with_automaton(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::BuiltinSolver;
    use crate::program::parse_program_automaton;

    const T1: &str = "
cells: n
state q0 initial accepting
state q1 accepting
state q2 accepting
trans q0 -> q1 : n--
trans q1 -> q0 : assert(n >= 0)
trans q1 -> q2 : n := 1
trans q2 -> q1 : assert(n >= 0)
";

    #[test]
    fn k1_keeps_satisfiable_labels() {
        let p = parse_program_automaton(T1).unwrap();
        let s = BuiltinSolver::default();
        let p1 = remove_k_infeasibility(&p, 1, &s, 1000).unwrap();
        assert_eq!(p1.automaton.num_states(), 3);
        assert_eq!(p1.automaton.transitions().len(), 4);
    }

    #[test]
    fn larger_windows_only_remove() {
        let p = parse_program_automaton(T1).unwrap();
        let s = BuiltinSolver::default();
        for k in 1..=4 {
            let pk = remove_k_infeasibility(&p, k, &s, 10_000).unwrap();
            // every trace of P_k is a trace of P
            let l = pk.automaton.find_lasso().unwrap();
            assert!(p.automaton.accepts_lasso(&l.stem, &l.cycle));
        }
    }
}
