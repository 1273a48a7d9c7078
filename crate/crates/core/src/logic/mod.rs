//! TSL(T) and HyperTSL(T) formulas.
//!
//! Derived operators are desugared during parsing: `a || b` becomes
//! `!(!a && !b)`, `F a` becomes `true U a` and `G a` becomes `!(true U !a)`.
//! A maximal operator-free subtree that is a boolean term becomes one
//! predicate atom, so `G (a = 0 && b = 1)` has a single atom.

mod eval;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::ParseError;
use crate::terms::{PredicateTerm, UpdateTerm};

pub use eval::{eval_hypertsl, eval_tsl, hyper_computation, seq_of};
pub use parse::parse_formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{line}:{column}: quantifiers must form a prenex prefix")]
    NonPrenex { line: usize, column: usize },
    #[error("trace variable `{0}` is not bound by the quantifier prefix")]
    UnboundTrace(String),
    #[error("trace variable `{0}` is quantified twice")]
    DuplicateTrace(String),
}

/// A temporal formula over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Temporal<A> {
    Const(bool),
    Atom(A),
    Not(Box<Temporal<A>>),
    And(Box<Temporal<A>>, Box<Temporal<A>>),
    Next(Box<Temporal<A>>),
    Until(Box<Temporal<A>>, Box<Temporal<A>>),
}

impl<A> Temporal<A> {
    /// Negation; a double negation collapses.
    pub fn not(f: Temporal<A>) -> Temporal<A> {
        match f {
            Temporal::Not(inner) => *inner,
            f => Temporal::Not(Box::new(f)),
        }
    }

    pub fn and(a: Temporal<A>, b: Temporal<A>) -> Temporal<A> {
        Temporal::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Temporal<A>, b: Temporal<A>) -> Temporal<A> {
        Temporal::not(Temporal::and(Temporal::not(a), Temporal::not(b)))
    }

    pub fn next(f: Temporal<A>) -> Temporal<A> {
        Temporal::Next(Box::new(f))
    }

    pub fn until(a: Temporal<A>, b: Temporal<A>) -> Temporal<A> {
        Temporal::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Temporal<A>) -> Temporal<A> {
        Temporal::until(Temporal::Const(true), f)
    }

    pub fn globally(f: Temporal<A>) -> Temporal<A> {
        Temporal::not(Temporal::eventually(Temporal::not(f)))
    }

    pub fn size(&self) -> usize {
        match self {
            Temporal::Const(_) | Temporal::Atom(_) => 1,
            Temporal::Not(a) | Temporal::Next(a) => 1 + a.size(),
            Temporal::And(a, b) | Temporal::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn map_atoms<B>(&self, f: &mut dyn FnMut(&A) -> B) -> Temporal<B> {
        match self {
            Temporal::Const(b) => Temporal::Const(*b),
            Temporal::Atom(a) => Temporal::Atom(f(a)),
            Temporal::Not(a) => Temporal::not(a.map_atoms(f)),
            Temporal::Next(a) => Temporal::next(a.map_atoms(f)),
            Temporal::And(a, b) => {
                let a = a.map_atoms(f);
                Temporal::and(a, b.map_atoms(f))
            }
            Temporal::Until(a, b) => {
                let a = a.map_atoms(f);
                Temporal::until(a, b.map_atoms(f))
            }
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut dyn FnMut(&'a A)) {
        match self {
            Temporal::Const(_) => {}
            Temporal::Atom(a) => f(a),
            Temporal::Not(a) | Temporal::Next(a) => a.for_each_atom(f),
            Temporal::And(a, b) | Temporal::Until(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }
}

impl<A: fmt::Display + PartialEq> fmt::Display for Temporal<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // the derived operators are printed in their sugared form
        if let Temporal::Not(inner) = self {
            match &**inner {
                Temporal::Until(a, b) if **a == Temporal::Const(true) => {
                    if let Temporal::Not(x) = &**b {
                        return write!(f, "G {x}");
                    }
                }
                Temporal::And(a, b) => {
                    if let (Temporal::Not(x), Temporal::Not(y)) = (&**a, &**b) {
                        return write!(f, "({x} || {y})");
                    }
                }
                _ => {}
            }
        }
        match self {
            Temporal::Until(a, b) if **a == Temporal::Const(true) => write!(f, "F {b}"),
            Temporal::Const(b) => write!(f, "{b}"),
            Temporal::Atom(a) => write!(f, "({a})"),
            Temporal::Not(a) => write!(f, "!{a}"),
            Temporal::Next(a) => write!(f, "X {a}"),
            Temporal::And(a, b) => write!(f, "({a} && {b})"),
            Temporal::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

/// A TSL atom: a predicate term or an update term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TslAtom {
    Pred(PredicateTerm),
    Upd(UpdateTerm),
}

impl fmt::Display for TslAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TslAtom::Pred(p) => write!(f, "{p}"),
            TslAtom::Upd(u) => write!(f, "{u}"),
        }
    }
}

pub type TemporalFormula = Temporal<TslAtom>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub prefix: Vec<(Quantifier, String)>,
    pub core: TemporalFormula,
}

impl Formula {
    pub fn is_tsl(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn traces(&self) -> Vec<String> {
        self.prefix.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn atoms(&self) -> AtomSet {
        atoms(&self.core)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, t) in &self.prefix {
            write!(f, "{} {t}. ", q.keyword())?;
        }
        write!(f, "{}", self.core)
    }
}

/// The predicate atoms ρ and update atoms υ of a formula, each sorted by
/// printed form. Atom indices number the predicates first, then the updates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AtomSet {
    pub predicates: Vec<PredicateTerm>,
    pub updates: Vec<UpdateTerm>,
}

impl AtomSet {
    pub fn len(&self) -> usize {
        self.predicates.len() + self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, atom: &TslAtom) -> Option<usize> {
        match atom {
            TslAtom::Pred(p) => self.predicates.iter().position(|x| x == p),
            TslAtom::Upd(u) => self
                .updates
                .iter()
                .position(|x| x == u)
                .map(|i| i + self.predicates.len()),
        }
    }

    pub fn get(&self, index: usize) -> TslAtom {
        if index < self.predicates.len() {
            TslAtom::Pred(self.predicates[index].clone())
        } else {
            TslAtom::Upd(self.updates[index - self.predicates.len()].clone())
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TslAtom> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }
}

/// Collects the distinct atoms occurring in `f`.
pub fn atoms(f: &TemporalFormula) -> AtomSet {
    let mut preds = BTreeMap::new();
    let mut upds = BTreeMap::new();
    f.for_each_atom(&mut |a| match a {
        TslAtom::Pred(p) => {
            preds.insert((p.to_string(), p.clone()), ());
        }
        TslAtom::Upd(u) => {
            upds.insert((u.to_string(), u.clone()), ());
        }
    });
    AtomSet {
        predicates: preds.into_keys().map(|(_, p)| p).collect(),
        updates: upds.into_keys().map(|(_, u)| u).collect(),
    }
}

/// Replaces each atom by its index in [`atoms`]; the result is an LTL formula.
pub fn ltl_skeleton(f: &TemporalFormula) -> (Temporal<usize>, AtomSet) {
    let set = atoms(f);
    let ltl = f.map_atoms(&mut |a| set.index_of(a).expect("atom collected above"));
    (ltl, set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_atoms() {
        let f = parse_formula("G (n > 0 && [n <- n + 7])").unwrap();
        let set = f.atoms();
        assert_eq!(set.predicates.len(), 1);
        assert_eq!(set.predicates[0].to_string(), "n > 0");
        assert_eq!(set.updates[0].to_string(), "[n <- n + 7]");
        let (ltl, _) = ltl_skeleton(&f.core);
        let expected = Temporal::globally(Temporal::and(Temporal::Atom(0), Temporal::Atom(1)));
        assert_eq!(ltl, expected);
    }

    #[test]
    fn gni_is_one_atom() {
        let f = parse_formula("forall pi. exists pi2. G (i[pi2] = 0 && c[pi] = c[pi2])").unwrap();
        let (ltl, set) = ltl_skeleton(&f.core);
        assert_eq!(set.len(), 1);
        assert_eq!(ltl, Temporal::globally(Temporal::Atom(0)));
    }

    #[test]
    fn negated_globally_is_eventually_not() {
        let f = parse_formula("!G (p = 1)").unwrap();
        let (ltl, _) = ltl_skeleton(&f.core);
        let expected = Temporal::eventually(Temporal::not(Temporal::Atom(0)));
        assert_eq!(ltl, expected);
    }
}
