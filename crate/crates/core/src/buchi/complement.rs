//! Rank-based complementation (level rankings with an obligation set).
//!
//! A complement state assigns each state of the complemented automaton `B`
//! either no rank or a rank in `0..=2m`, where `m` counts the non-accepting
//! states of `B` that lie on a cycle and accepting states only take
//! even ranks, together with the set of even-ranked states that still owe a
//! visit to an odd rank. Ranks never increase along edges of `B`. A
//! complement state is accepting when the obligation set is empty.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::graph::{on_cycle, scc};
use super::{BuchiAutomaton, BuchiError, Label, StateId};

pub const DEFAULT_COMPLEMENT_BUDGET: usize = 1_000_000;

const NO_RANK: i32 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct RankState {
    ranks: Vec<i32>,
    owing: Vec<bool>,
}

impl RankState {
    fn accepting(&self) -> bool {
        !self.owing.iter().any(|&o| o)
    }
}

struct Ranker<'a, L, U> {
    b: &'a BuchiAutomaton<L, U>,
    edges: Vec<HashMap<L, Vec<StateId>>>,
    // acceptance with states off every cycle counted as accepting
    accepting: Vec<bool>,
    max_rank: i32,
}

impl<'a, L: Label, U: Clone> Ranker<'a, L, U> {
    fn new(b: &'a BuchiAutomaton<L, U>) -> Self {
        let mut edges: Vec<HashMap<L, Vec<StateId>>> = vec![HashMap::new(); b.num_states()];
        for t in b.transitions() {
            edges[t.from].entry(t.label.clone()).or_default().push(t.to);
        }
        let adj = b.adjacency();
        let cyclic = on_cycle(&adj, &scc(&adj));
        let accepting: Vec<bool> = (0..b.num_states())
            .map(|q| b.is_accepting(q) || !cyclic[q])
            .collect();
        let max_rank = 2 * accepting.iter().filter(|&&a| !a).count() as i32;
        Ranker {
            b,
            edges,
            accepting,
            max_rank,
        }
    }

    fn initial(&self) -> RankState {
        let n = self.b.num_states();
        let mut ranks = vec![NO_RANK; n];
        ranks[self.b.initial()] = self.max_rank;
        RankState {
            ranks,
            owing: vec![false; n],
        }
    }

    fn successors(&self, s: &RankState, letter: &L) -> Vec<RankState> {
        let n = self.b.num_states();
        let mut bound = vec![NO_RANK; n];
        let mut from_owing = vec![false; n];
        for q in 0..n {
            if s.ranks[q] == NO_RANK {
                continue;
            }
            if let Some(targets) = self.edges[q].get(letter) {
                for &q2 in targets {
                    bound[q2] = if bound[q2] == NO_RANK {
                        s.ranks[q]
                    } else {
                        bound[q2].min(s.ranks[q])
                    };
                    from_owing[q2] |= s.owing[q];
                }
            }
        }
        let present: Vec<StateId> = (0..n).filter(|&q| bound[q] != NO_RANK).collect();
        let choices: Vec<Vec<i32>> = present
            .iter()
            .map(|&q| {
                (0..=bound[q])
                    .filter(|r| !self.accepting[q] || r % 2 == 0)
                    .collect()
            })
            .collect();
        let fresh = s.accepting();
        let mut out = Vec::new();
        let mut pick = vec![0usize; present.len()];
        loop {
            let mut ranks = vec![NO_RANK; n];
            let mut owing = vec![false; n];
            for (k, &q) in present.iter().enumerate() {
                let r = choices[k][pick[k]];
                ranks[q] = r;
                owing[q] = r % 2 == 0 && (fresh || from_owing[q]);
            }
            out.push(RankState { ranks, owing });
            // odometer over the rank choices
            let mut k = 0;
            loop {
                if k == present.len() {
                    return out;
                }
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    fn describe(&self, s: &RankState) -> String {
        let mut out = String::from("{");
        let mut first = true;
        for q in 0..s.ranks.len() {
            if s.ranks[q] == NO_RANK {
                continue;
            }
            if !first {
                out.push_str(", ");
            }
            first = false;
            let _ = write!(out, "{}:{}", self.b.name(q), s.ranks[q]);
            if s.owing[q] {
                out.push('*');
            }
        }
        out.push('}');
        out
    }
}

/// Interning table for complement states with lazily computed successors.
struct LazyComplement<'a, L, U> {
    ranker: Ranker<'a, L, U>,
    states: Vec<RankState>,
    ids: HashMap<RankState, usize>,
    succ: HashMap<(usize, L), Vec<usize>>,
    budget: usize,
}

impl<'a, L: Label, U: Clone> LazyComplement<'a, L, U> {
    fn new(b: &'a BuchiAutomaton<L, U>, budget: usize) -> Self {
        let ranker = Ranker::new(b);
        let init = ranker.initial();
        LazyComplement {
            ranker,
            states: vec![init.clone()],
            ids: HashMap::from([(init, 0)]),
            succ: HashMap::new(),
            budget,
        }
    }

    fn successors(&mut self, c: usize, letter: &L) -> Result<Vec<usize>, BuchiError> {
        if let Some(s) = self.succ.get(&(c, letter.clone())) {
            return Ok(s.clone());
        }
        let mut ids = Vec::new();
        for next in self.ranker.successors(&self.states[c], letter) {
            let id = match self.ids.get(&next) {
                Some(&id) => id,
                None => {
                    if self.states.len() >= self.budget {
                        return Err(BuchiError::BudgetExceeded(self.states.len()));
                    }
                    self.states.push(next.clone());
                    self.ids.insert(next, self.states.len() - 1);
                    self.states.len() - 1
                }
            };
            ids.push(id);
        }
        self.succ.insert((c, letter.clone()), ids.clone());
        Ok(ids)
    }

    fn accepting(&self, c: usize) -> bool {
        self.states[c].accepting()
    }

    fn name(&self, c: usize) -> String {
        self.ranker.describe(&self.states[c])
    }
}

/// The complement of `b` with respect to the words over `alphabet`.
pub fn complement<L: Label, U: Clone>(
    b: &BuchiAutomaton<L, U>,
    alphabet: &[L],
    budget: usize,
) -> Result<BuchiAutomaton<L>, BuchiError> {
    let trimmed = b.trim();
    let mut lazy = LazyComplement::new(&trimmed, budget);
    let mut out = BuchiAutomaton::new(lazy.name(0), lazy.accepting(0));
    let mut i = 0;
    while i < out.num_states() {
        for letter in alphabet {
            for c in lazy.successors(i, letter)? {
                while out.num_states() <= c {
                    let k = out.num_states();
                    out.add_state(lazy.name(k), lazy.accepting(k));
                }
                out.add_transition(i, letter.clone(), c, ());
            }
        }
        i += 1;
    }
    Ok(out)
}

/// `L(a) \ L(b)`, built on the fly so the complement of `b` is only expanded
/// on letters that `a` can read. The result keeps the tags of `a`.
pub fn difference<L: Label, T: Clone, U: Clone>(
    a: &BuchiAutomaton<L, T>,
    b: &BuchiAutomaton<L, U>,
    budget: usize,
) -> Result<BuchiAutomaton<L, T>, BuchiError> {
    let trimmed = b.trim();
    let mut lazy = LazyComplement::new(&trimmed, budget);
    // with every state of `a` accepting only the complement's acceptance
    // matters and one track suffices
    let single = (0..a.num_states()).all(|q| a.is_accepting(q));
    let start = (a.initial(), 0usize, 0u8);
    let mut out = BuchiAutomaton::new(
        format!("({}, {}, 0)", a.name(start.0), lazy.name(0)),
        if single { lazy.accepting(0) } else { a.is_accepting(start.0) },
    );
    let mut ids = HashMap::from([(start, 0usize)]);
    let mut work = vec![start];
    while let Some((p, c, track)) = work.pop() {
        let src = ids[&(p, c, track)];
        let next_track = match track {
            _ if single => 0,
            0 if a.is_accepting(p) => 1,
            1 if lazy.accepting(c) => 0,
            t => t,
        };
        for &i in a.outgoing(p) {
            let t = a.transition(i);
            for c2 in lazy.successors(c, &t.label)? {
                let accepting = if single {
                    lazy.accepting(c2)
                } else {
                    next_track == 0 && a.is_accepting(t.to)
                };
                let key = (t.to, c2, next_track);
                let dst = match ids.get(&key) {
                    Some(&d) => d,
                    None => {
                        if out.num_states() + lazy.states.len() >= budget {
                            return Err(BuchiError::BudgetExceeded(
                                out.num_states() + lazy.states.len(),
                            ));
                        }
                        let d = out.add_state(
                            format!("({}, {}, {})", a.name(t.to), lazy.name(c2), next_track),
                            accepting,
                        );
                        ids.insert(key, d);
                        work.push(key);
                        d
                    }
                };
                out.add_transition(src, t.label.clone(), dst, t.tag.clone());
            }
        }
    }
    Ok(out)
}
