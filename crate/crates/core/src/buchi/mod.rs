//! Büchi automata over an arbitrary label type.
//!
//! States are dense indices. Transitions are a set: adding a transition that
//! already exists with the same source, label and target is a no-op, and the
//! first tag wins. Every algorithm iterates states and transitions in index
//! order, so results are reproducible.

mod complement;
mod cycles;
mod dot;
mod emptiness;
mod graph;
mod product;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

pub use complement::{complement, difference, DEFAULT_COMPLEMENT_BUDGET};
pub use emptiness::Lasso;

pub type StateId = usize;

/// Requirements on transition labels.
pub trait Label: Clone + Eq + Hash + Ord + fmt::Display + fmt::Debug {}

impl<T: Clone + Eq + Hash + Ord + fmt::Display + fmt::Debug> Label for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuchiError {
    #[error("automaton construction exceeded its budget after generating {0} states")]
    BudgetExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition<L, T = ()> {
    pub from: StateId,
    pub label: L,
    pub to: StateId,
    pub tag: T,
}

#[derive(Debug, Clone)]
pub struct BuchiAutomaton<L, T = ()> {
    names: Vec<String>,
    accepting: Vec<bool>,
    initial: StateId,
    transitions: Vec<Transition<L, T>>,
    out: Vec<Vec<usize>>,
    seen: HashSet<(StateId, L, StateId)>,
}

impl<L: Label, T: Clone> BuchiAutomaton<L, T> {
    /// An automaton with a single initial state.
    pub fn new(initial_name: impl Into<String>, accepting: bool) -> Self {
        BuchiAutomaton {
            names: vec![initial_name.into()],
            accepting: vec![accepting],
            initial: 0,
            transitions: Vec::new(),
            out: vec![Vec::new()],
            seen: HashSet::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> StateId {
        self.names.push(name.into());
        self.accepting.push(accepting);
        self.out.push(Vec::new());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, q: StateId) {
        assert!(q < self.names.len());
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    /// Adds a transition; returns false when it was already present.
    pub fn add_transition(&mut self, from: StateId, label: L, to: StateId, tag: T) -> bool {
        assert!(from < self.names.len() && to < self.names.len());
        if !self.seen.insert((from, label.clone(), to)) {
            return false;
        }
        self.out[from].push(self.transitions.len());
        self.transitions.push(Transition {
            from,
            label,
            to,
            tag,
        });
        true
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self) -> &[Transition<L, T>] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition<L, T> {
        &self.transitions[i]
    }

    /// Indices of the transitions leaving `q`, in insertion order.
    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.out[q]
    }

    pub fn labels(&self) -> BTreeSet<L> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    /// Rebuilds the automaton on the states selected by `keep`, preserving
    /// their relative order. The initial state is always kept.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut order: Vec<StateId> = (0..self.num_states())
            .filter(|&q| keep[q] || q == self.initial)
            .collect();
        // the initial state becomes index 0
        order.retain(|&q| q != self.initial);
        order.insert(0, self.initial);
        let mut out = BuchiAutomaton::new(
            self.names[self.initial].clone(),
            self.accepting[self.initial],
        );
        map[self.initial] = 0;
        for &q in &order[1..] {
            map[q] = out.add_state(self.names[q].clone(), self.accepting[q]);
        }
        for t in &self.transitions {
            if map[t.from] != usize::MAX && map[t.to] != usize::MAX {
                out.add_transition(map[t.from], t.label.clone(), map[t.to], t.tag.clone());
            }
        }
        out
    }

    /// Relabels every transition; `f` may drop a transition by returning None.
    /// Transitions that collapse onto the same label are merged.
    pub fn relabel<L2: Label, T2: Clone>(
        &self,
        mut f: impl FnMut(&Transition<L, T>) -> Option<(L2, T2)>,
    ) -> BuchiAutomaton<L2, T2> {
        let mut out = BuchiAutomaton {
            names: self.names.clone(),
            accepting: self.accepting.clone(),
            initial: self.initial,
            transitions: Vec::new(),
            out: vec![Vec::new(); self.num_states()],
            seen: HashSet::new(),
        };
        for t in &self.transitions {
            if let Some((l, tag)) = f(t) {
                out.add_transition(t.from, l, t.to, tag);
            }
        }
        out
    }

    /// Drops all tags.
    pub fn untagged(&self) -> BuchiAutomaton<L> {
        self.relabel(|t| Some((t.label.clone(), ())))
    }

    pub(crate) fn successors(&self, q: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.out[q].iter().map(move |&i| self.transitions[i].to)
    }
}

impl<L: Label, T: Clone> fmt::Display for BuchiAutomaton<L, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_states() {
            write!(f, "state {}", self.names[q])?;
            if q == self.initial {
                f.write_str(" initial")?;
            }
            if self.accepting[q] {
                f.write_str(" accepting")?;
            }
            writeln!(f)?;
        }
        for t in &self.transitions {
            writeln!(
                f,
                "trans {} -> {} : {}",
                self.names[t.from], self.names[t.to], t.label
            )?;
        }
        Ok(())
    }
}
