//! Solver interface: queries over integer variables and their results.

use std::collections::BTreeSet;
use std::fmt;

use crate::terms::{evaluate, Assignment, Ident, Term, Value};

/// A conjunction of boolean terms over integer variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Query {
    pub vars: BTreeSet<Ident>,
    pub asserts: Vec<Term>,
}

impl Query {
    pub fn new() -> Self {
        Query::default()
    }

    pub fn declare(&mut self, v: Ident) {
        self.vars.insert(v);
    }

    /// Adds an assertion and declares its variables.
    pub fn assert(&mut self, t: Term) {
        self.vars.extend(t.vars());
        self.asserts.push(t);
    }

    /// The query keeping only the assertions selected by `keep`.
    pub fn subset(&self, keep: &[bool]) -> Query {
        Query {
            vars: self.vars.clone(),
            asserts: self
                .asserts
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(t, _)| t.clone())
                .collect(),
        }
    }

    /// Completes `model` with zeros and checks every assertion.
    pub fn check_model(&self, model: &Assignment) -> Option<Assignment> {
        let mut full = model.clone();
        for v in &self.vars {
            if !full.contains(v) {
                full.set(v.clone(), Value::int(0));
            }
        }
        self.asserts
            .iter()
            .all(|t| evaluate(t, &full) == Ok(Value::Bool(true)))
            .then_some(full)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.asserts {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverResult {
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

impl SolverResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolverResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolverResult::Unsat)
    }
}

/// A decision procedure for quantifier-free linear integer arithmetic.
/// Implementations may give up with `Unknown`; a `Sat` model must satisfy
/// the query.
pub trait Solver {
    fn check(&self, q: &Query) -> SolverResult;

    fn name(&self) -> String;
}

/// Shrinks an unsatisfiable query to an irredundant unsatisfiable subset
/// of its assertions by deletion. Returns the kept indices.
pub fn unsat_core(solver: &dyn Solver, q: &Query) -> Vec<usize> {
    let mut keep = vec![true; q.asserts.len()];
    for i in 0..keep.len() {
        keep[i] = false;
        if !solver.check(&q.subset(&keep)).is_unsat() {
            keep[i] = true;
        }
    }
    (0..keep.len()).filter(|&i| keep[i]).collect()
}
