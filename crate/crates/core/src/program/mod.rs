//! Program statements and program automata.
//!
//! A basic statement executed at step `t` reads cells from `ζ_{t-1}` and
//! free inputs from `ζ_t`, and every framed identifier it does not write
//! keeps its value. Once inputs have been turned into cells by the combined
//! product they are framed like any other cell.

mod compose;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::buchi::BuchiAutomaton;
use crate::syntax::ParseError;
use crate::terms::{evaluate, holds, Assignment, Ident, PredicateTerm, Term, Value};

pub use compose::{combine, combined_product, compose, self_compose, tmp_cell, universal_projection, Provenance};
pub use parse::{parse_program_automaton, parse_statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    Assert(PredicateTerm),
    Assign(Ident, Term),
    Havoc(Ident),
    Seq(Box<Statement>, Box<Statement>),
}

impl Statement {
    pub fn assert(p: PredicateTerm) -> Statement {
        Statement::Assert(p)
    }

    pub fn assert_term(t: Term) -> Statement {
        Statement::Assert(PredicateTerm::new(t).expect("boolean assertion"))
    }

    pub fn assign(c: Ident, t: Term) -> Statement {
        Statement::Assign(c, t)
    }

    pub fn havoc(c: Ident) -> Statement {
        Statement::Havoc(c)
    }

    /// Right-nested sequence; a single statement is returned unchanged and
    /// the empty sequence is `assert(true)`.
    pub fn sequence(parts: Vec<Statement>) -> Statement {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Statement::assert_term(Term::bool(true)),
            Some(last) => it.fold(last, |acc, s| Statement::Seq(Box::new(s), Box::new(acc))),
        }
    }

    pub fn is_basic(&self) -> bool {
        !matches!(self, Statement::Seq(..))
    }

    /// The basic statements in execution order.
    pub fn flatten(&self) -> Vec<Statement> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    fn flatten_into(&self, out: &mut Vec<Statement>) {
        match self {
            Statement::Seq(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            s => out.push(s.clone()),
        }
    }

    /// Identifiers read by the statement.
    pub fn reads(&self) -> BTreeSet<Ident> {
        match self {
            Statement::Assert(p) => p.term().vars(),
            Statement::Assign(_, t) => t.vars(),
            Statement::Havoc(_) => BTreeSet::new(),
            Statement::Seq(a, b) => {
                let mut r = a.reads();
                r.extend(b.reads());
                r
            }
        }
    }

    /// Identifiers written by the statement.
    pub fn writes(&self) -> BTreeSet<Ident> {
        match self {
            Statement::Assert(_) => BTreeSet::new(),
            Statement::Assign(c, _) | Statement::Havoc(c) => BTreeSet::from([c.clone()]),
            Statement::Seq(a, b) => {
                let mut w = a.writes();
                w.extend(b.writes());
                w
            }
        }
    }

    pub fn idents(&self) -> BTreeSet<Ident> {
        let mut all = self.reads();
        all.extend(self.writes());
        all
    }

    pub fn map_idents(&self, f: &dyn Fn(&Ident) -> Ident) -> Statement {
        match self {
            Statement::Assert(p) => Statement::Assert(PredicateTerm(p.term().map_vars(f))),
            Statement::Assign(c, t) => Statement::Assign(f(c), t.map_vars(f)),
            Statement::Havoc(c) => Statement::Havoc(f(c)),
            Statement::Seq(a, b) => {
                Statement::Seq(Box::new(a.map_idents(f)), Box::new(b.map_idents(f)))
            }
        }
    }

    /// Attaches every identifier to `trace`.
    pub fn on_trace(&self, trace: &str) -> Statement {
        self.map_idents(&|id| id.on_trace(trace))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Assert(p) => write!(f, "assert({p})"),
            Statement::Assign(c, t) => write!(f, "{c} := {t}"),
            Statement::Havoc(c) => write!(f, "{c} := *"),
            Statement::Seq(a, b) => write!(f, "{a}; {b}"),
        }
    }
}

/// The identifiers a program ranges over.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Universe {
    /// Identifiers whose values persist between steps.
    pub framed: BTreeSet<Ident>,
    /// Free inputs, read at the step that consumes them.
    pub inputs: BTreeSet<Ident>,
    /// `ζ₋₁`, total on framed identifiers and inputs.
    pub initial: Assignment,
}

impl Universe {
    pub fn idents(&self) -> impl Iterator<Item = &Ident> {
        self.framed.iter().chain(&self.inputs)
    }

    pub fn contains(&self, id: &Ident) -> bool {
        self.framed.contains(id) || self.inputs.contains(id)
    }

    /// The values a step reads: framed identifiers from `prev`, inputs
    /// from `cur`.
    pub fn read_view(&self, prev: &Assignment, cur: &Assignment) -> Assignment {
        prev.restrict(|id| self.framed.contains(id))
            .merged(&cur.restrict(|id| self.inputs.contains(id)))
    }

    /// Renames every identifier onto `trace`.
    pub fn on_trace(&self, trace: &str) -> Universe {
        Universe {
            framed: self.framed.iter().map(|id| id.on_trace(trace)).collect(),
            inputs: self.inputs.iter().map(|id| id.on_trace(trace)).collect(),
            initial: self.initial.map_idents(|id| id.on_trace(trace)),
        }
    }

    pub fn union(&self, other: &Universe) -> Universe {
        Universe {
            framed: self.framed.union(&other.framed).cloned().collect(),
            inputs: self.inputs.union(&other.inputs).cloned().collect(),
            initial: self.initial.merged(&other.initial),
        }
    }

    /// Keeps the identifiers satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&Ident) -> bool) -> Universe {
        Universe {
            framed: self.framed.iter().filter(|id| keep(id)).cloned().collect(),
            inputs: self.inputs.iter().filter(|id| keep(id)).cloned().collect(),
            initial: self.initial.restrict(keep),
        }
    }
}

/// Whether the step from `prev` to `cur` matches the basic statement `s`.
/// Composite statements never match a single step.
pub fn matches_step(u: &Universe, prev: &Assignment, cur: &Assignment, s: &Statement) -> bool {
    let view = u.read_view(prev, cur);
    let frame_except = |skip: Option<&Ident>| {
        u.framed
            .iter()
            .filter(|c| Some(*c) != skip)
            .all(|c| matches!((prev.get(c), cur.get(c)), (Ok(a), Ok(b)) if a == b))
    };
    match s {
        Statement::Assert(p) => holds(p, &view) == Ok(true) && frame_except(None),
        Statement::Assign(c, t) => {
            let ok = match (evaluate(t, &view), cur.get(c)) {
                (Ok(v), Ok(w)) => v == *w,
                _ => false,
            };
            ok && frame_except(Some(c))
        }
        Statement::Havoc(c) => {
            matches!(cur.get(c), Ok(Value::Int(_))) && frame_except(Some(c))
        }
        Statement::Seq(..) => false,
    }
}

/// Whether `steps` (starting after `initial`) match the basic statements
/// `stmts` one by one.
pub fn matches_run(u: &Universe, initial: &Assignment, steps: &[Assignment], stmts: &[Statement]) -> bool {
    if steps.len() != stmts.len() {
        return false;
    }
    let mut prev = initial;
    for (cur, s) in steps.iter().zip(stmts) {
        if !matches_step(u, prev, cur, s) {
            return false;
        }
        prev = cur;
    }
    true
}

/// A Büchi automaton over statements together with its identifiers.
#[derive(Debug, Clone)]
pub struct ProgramAutomaton<T = ()> {
    pub automaton: BuchiAutomaton<Statement, T>,
    pub universe: Universe,
}

impl<T: Clone> ProgramAutomaton<T> {
    pub fn new(automaton: BuchiAutomaton<Statement, T>, universe: Universe) -> Self {
        ProgramAutomaton { automaton, universe }
    }

    /// Same universe, different automaton.
    pub fn with_automaton<U: Clone>(&self, automaton: BuchiAutomaton<Statement, U>) -> ProgramAutomaton<U> {
        ProgramAutomaton {
            automaton,
            universe: self.universe.clone(),
        }
    }
}

impl ProgramAutomaton<()> {
    /// The automaton accepting exactly `stem · cycle^ω`.
    pub fn lasso(universe: Universe, stem: &[Statement], cycle: &[Statement]) -> Self {
        assert!(!cycle.is_empty());
        let mut a = BuchiAutomaton::new("l0", true);
        let n = stem.len() + cycle.len();
        for j in 1..n {
            a.add_state(format!("l{j}"), true);
        }
        for (j, s) in stem.iter().chain(cycle).enumerate() {
            let to = if j + 1 == n { stem.len() } else { j + 1 };
            a.add_transition(j, s.clone(), to, ());
        }
        ProgramAutomaton::new(a, universe)
    }

    /// Tags every transition with its own label as the single part.
    pub fn with_provenance(&self) -> ProgramAutomaton<Provenance> {
        self.with_automaton(self.automaton.relabel(|t| {
            Some((
                t.label.clone(),
                Provenance {
                    parts: vec![t.label.clone()],
                    valuation: None,
                },
            ))
        }))
    }
}

impl<T: Clone> fmt::Display for ProgramAutomaton<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ids: Vec<&Ident>| ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "cells: {}", list(self.universe.framed.iter().collect()))?;
        writeln!(f, "inputs: {}", list(self.universe.inputs.iter().collect()))?;
        write!(f, "{}", self.automaton)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn stmt(s: &str) -> Statement {
        parse_statement(s, &BTreeSet::from([Ident::input("i")])).unwrap()
    }

    fn uni() -> Universe {
        Universe {
            framed: BTreeSet::from([Ident::cell("n"), Ident::cell("c")]),
            inputs: BTreeSet::from([Ident::input("i")]),
            initial: Assignment::new(),
        }
    }

    fn a(n: i64, c: i64, i: i64) -> Assignment {
        Assignment::new()
            .with(Ident::cell("n"), Value::int(n))
            .with(Ident::cell("c"), Value::int(c))
            .with(Ident::input("i"), Value::int(i))
    }

    #[test]
    fn flatten_sequences() {
        let s = stmt("n := 1; assert(n > 0); c := *");
        assert_eq!(s.flatten().len(), 3);
        assert_eq!(stmt("assert(n > 0)").flatten(), vec![stmt("assert(n > 0)")]);
    }

    #[test]
    fn step_semantics() {
        let u = uni();
        assert!(matches_step(&u, &a(0, 0, 0), &a(0, 0, 5), &stmt("assert(n >= 0)")));
        assert!(matches_step(&u, &a(0, 0, 0), &a(-1, 0, 0), &stmt("n--")));
        assert!(!matches_step(&u, &a(-1, 0, 0), &a(-1, 0, 0), &stmt("assert(n >= 0)")));
        assert!(!matches_step(&u, &a(0, 0, 0), &a(0, 1, 0), &stmt("assert(n >= 0)")));
        assert!(matches_step(&u, &a(0, 0, 0), &a(7, 0, 0), &stmt("n := *")));
        assert!(!matches_step(&u, &a(0, 0, 0), &a(7, 1, 0), &stmt("n := *")));
    }

    #[test]
    fn inputs_are_read_from_the_current_step() {
        let u = uni();
        assert!(matches_step(&u, &a(0, 0, 0), &a(0, 0, -3), &stmt("assert(i < 0)")));
        assert!(!matches_step(&u, &a(0, 0, -3), &a(0, 0, 0), &stmt("assert(i < 0)")));
        assert!(matches_step(&u, &a(0, 0, 9), &a(0, 4, 4), &stmt("c := i")));
    }

    #[test]
    fn sequence_display() {
        let s = Statement::sequence(vec![
            Statement::assign(Ident::cell("n"), parse_term("n - 1").unwrap()),
            Statement::assert_term(parse_term("n >= 0").unwrap()),
        ]);
        assert_eq!(s.to_string(), "n := n - 1; assert(n >= 0)");
        assert_eq!(Statement::sequence(vec![]).to_string(), "assert(true)");
    }
}
