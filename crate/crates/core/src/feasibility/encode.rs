//! Constraint encoding of statement sequences.
//!
//! Every framed identifier `x` gets one variable per write, named `x@t`
//! after the step `t` that wrote it (`x@-1` for the initial value). An
//! input read at step `t` is the variable `i@t`. Unwritten identifiers keep
//! their variable, which encodes the frame condition exactly.

use std::collections::BTreeMap;

use crate::program::{Statement, Universe};
use crate::terms::{Assignment, Ident, Term, Value};

use super::smt::Query;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// The initial values are unconstrained.
    Free,
    /// The initial values are those of the universe.
    Pinned,
}

pub fn step_var(x: &Ident, t: i64) -> Ident {
    Ident::cell(format!("{x}@{t}"))
}

/// Incremental encoder over one universe.
#[derive(Debug, Clone)]
pub struct Encoder<'a> {
    universe: &'a Universe,
    pub query: Query,
    current: BTreeMap<Ident, Ident>,
    /// Framed variables after each step; entry 0 is the initial state.
    history: Vec<BTreeMap<Ident, Ident>>,
    inputs: Vec<BTreeMap<Ident, Ident>>,
}

impl<'a> Encoder<'a> {
    pub fn new(universe: &'a Universe, init: Init) -> Self {
        let mut query = Query::new();
        let mut current = BTreeMap::new();
        for x in &universe.framed {
            let v = step_var(x, -1);
            query.declare(v.clone());
            if init == Init::Pinned {
                let value = universe
                    .initial
                    .get(x)
                    .cloned()
                    .unwrap_or_else(|_| Value::int(0));
                query.assert(Term::eq(Term::var(v.clone()), Term::Const(value)));
            }
            current.insert(x.clone(), v);
        }
        Encoder {
            universe,
            query,
            history: vec![current.clone()],
            current,
            inputs: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.inputs.len()
    }

    /// Appends every basic statement of `s`.
    pub fn push(&mut self, s: &Statement) {
        for b in s.flatten() {
            self.push_basic(&b);
        }
    }

    fn push_basic(&mut self, s: &Statement) {
        let t = self.inputs.len() as i64;
        let mut step_inputs = BTreeMap::new();
        for id in s.reads() {
            if self.universe.inputs.contains(&id) {
                let v = step_var(&id, t);
                self.query.declare(v.clone());
                step_inputs.insert(id, v);
            }
        }
        let view = |id: &Ident| -> Option<Term> {
            self.current
                .get(id)
                .or_else(|| step_inputs.get(id))
                .map(|v| Term::var(v.clone()))
        };
        match s {
            Statement::Assert(p) => {
                let c = p.term().substitute(&view);
                self.query.assert(c);
            }
            Statement::Assign(c, e) => {
                let rhs = e.substitute(&view);
                let v = step_var(c, t);
                self.query.declare(v.clone());
                self.query.assert(Term::eq(Term::var(v.clone()), rhs));
                self.current.insert(c.clone(), v);
            }
            Statement::Havoc(c) => {
                let v = step_var(c, t);
                self.query.declare(v.clone());
                self.current.insert(c.clone(), v);
            }
            Statement::Seq(..) => unreachable!("flattened"),
        }
        self.history.push(self.current.clone());
        self.inputs.push(step_inputs);
    }

    /// The framed variables after `steps` basic statements.
    pub fn state_vars(&self, steps: usize) -> &BTreeMap<Ident, Ident> {
        &self.history[steps]
    }

    /// Requires the framed values after `a` and after `b` steps to agree.
    pub fn assert_same_state(&mut self, a: usize, b: usize) {
        let pairs: Vec<(Ident, Ident)> = self.history[a]
            .iter()
            .map(|(x, v)| (v.clone(), self.history[b][x].clone()))
            .collect();
        for (u, w) in pairs {
            if u != w {
                self.query.assert(Term::eq(Term::var(u), Term::var(w)));
            }
        }
    }

    /// Decodes a model into `ζ₋₁` and one assignment per step. Inputs that
    /// were never read take their initial value.
    pub fn decode(&self, model: &Assignment) -> (Assignment, Vec<Assignment>) {
        let value = |v: &Ident| model.get(v).cloned().unwrap_or_else(|_| Value::int(0));
        let at = |k: usize| -> Assignment {
            let mut a = Assignment::new();
            for (x, v) in &self.history[k] {
                a.set(x.clone(), value(v));
            }
            for i in &self.universe.inputs {
                let v = match k.checked_sub(1).and_then(|t| self.inputs[t].get(i)) {
                    Some(var) => value(var),
                    None => self
                        .universe
                        .initial
                        .get(i)
                        .cloned()
                        .unwrap_or_else(|_| Value::int(0)),
                };
                a.set(i.clone(), v);
            }
            a
        };
        let initial = at(0);
        let steps = (1..=self.steps()).map(at).collect();
        (initial, steps)
    }
}

/// The query for `stmts` from the given initial state.
pub fn encode_window(u: &Universe, stmts: &[Statement], init: Init) -> Query {
    let mut e = Encoder::new(u, init);
    for s in stmts {
        e.push(s);
    }
    e.query
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{BuiltinSolver, Solver};
    use crate::program::{matches_run, parse_statement};
    use std::collections::BTreeSet;

    fn uni() -> Universe {
        Universe {
            framed: BTreeSet::from([Ident::cell("n")]),
            inputs: BTreeSet::from([Ident::input("i")]),
            initial: Assignment::zeros(&[Ident::cell("n"), Ident::input("i")]),
        }
    }

    fn stmts(text: &str) -> Vec<Statement> {
        parse_statement(text, &BTreeSet::from([Ident::input("i")]))
            .unwrap()
            .flatten()
    }

    #[test]
    fn three_window_of_t1_is_unsat() {
        let s = BuiltinSolver::default();
        let w = stmts("n--; assert(n >= 0); n := 1; assert(n >= 0); n--; assert(n >= 0); n--; assert(n >= 0)");
        assert!(s.check(&encode_window(&uni(), &w, Init::Free)).is_unsat());
        let w = stmts("n := 1; n--; assert(n >= 0)");
        assert!(s.check(&encode_window(&uni(), &w, Init::Free)).is_sat());
    }

    #[test]
    fn decoded_models_match() {
        let u = uni();
        let w = stmts("n := i; assert(n < 0); n--; assert(i > 3)");
        let mut e = Encoder::new(&u, Init::Pinned);
        for s in &w {
            e.push(s);
        }
        let crate::feasibility::SolverResult::Sat(m) = BuiltinSolver::default().check(&e.query) else {
            panic!()
        };
        let (init, steps) = e.decode(&m);
        assert!(matches_run(&u, &init, &steps, &w));
    }
}
