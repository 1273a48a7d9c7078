//! Emptiness, lasso extraction, lasso membership and trimming.

use std::collections::VecDeque;

use super::graph::{can_reach, explore, on_cycle, reachable_from, scc};
use super::{BuchiAutomaton, Label, StateId};

/// An accepted ultimately periodic word `stem · cycle^ω` together with the
/// transitions (by index) that accept it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso<L> {
    pub stem: Vec<L>,
    pub cycle: Vec<L>,
    pub stem_path: Vec<usize>,
    pub cycle_path: Vec<usize>,
}

impl<L: Label> Lasso<L> {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Builds a lasso from transition paths of `a`.
    pub fn from_paths<T: Clone>(
        a: &BuchiAutomaton<L, T>,
        stem_path: Vec<usize>,
        cycle_path: Vec<usize>,
    ) -> Self {
        let labels = |p: &[usize]| p.iter().map(|&i| a.transition(i).label.clone()).collect();
        Lasso {
            stem: labels(&stem_path),
            cycle: labels(&cycle_path),
            stem_path,
            cycle_path,
        }
    }

    /// Checks that the paths are connected, start in the initial state, close
    /// the cycle and visit an accepting state on it.
    pub fn is_valid_in<T: Clone>(&self, a: &BuchiAutomaton<L, T>) -> bool {
        if self.cycle_path.is_empty() {
            return false;
        }
        let path: Vec<usize> = self.stem_path.iter().chain(&self.cycle_path).copied().collect();
        let mut q = a.initial();
        for &i in &path {
            let t = a.transition(i);
            if t.from != q {
                return false;
            }
            q = t.to;
        }
        let entry = a.transition(self.cycle_path[0]).from;
        let labels_ok = self
            .stem
            .iter()
            .chain(&self.cycle)
            .zip(&path)
            .all(|(l, &i)| a.transition(i).label == *l);
        q == entry
            && labels_ok
            && self
                .cycle_path
                .iter()
                .any(|&i| a.is_accepting(a.transition(i).from))
    }
}

impl<L: Label, T: Clone> BuchiAutomaton<L, T> {
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.num_states())
            .map(|q| self.successors(q).collect())
            .collect()
    }

    /// Shortest accepting lasso, or None when the language is empty.
    pub fn find_lasso(&self) -> Option<Lasso<L>> {
        let adj = self.adjacency();
        let comp = scc(&adj);
        let cyclic = on_cycle(&adj, &comp);
        let (dist, parent) = self.bfs_tree(self.initial, |_| true);
        let target = (0..self.num_states())
            .filter(|&q| self.is_accepting(q) && cyclic[q] && dist[q] != usize::MAX)
            .min_by_key(|&q| (dist[q], q))?;
        let stem_path = path_to(&parent, self, self.initial, target);
        // shortest cycle through `target` inside its component
        let c = comp[target];
        let mut best: Option<Vec<usize>> = None;
        for &i in self.outgoing(target) {
            let t = self.transition(i);
            if comp[t.to] != c {
                continue;
            }
            let (d2, p2) = self.bfs_tree(t.to, |q| comp[q] == c);
            if d2[target] == usize::MAX {
                continue;
            }
            let mut cyc = vec![i];
            cyc.extend(path_to(&p2, self, t.to, target));
            if best.as_ref().map_or(true, |b| cyc.len() < b.len()) {
                best = Some(cyc);
            }
        }
        Some(Lasso::from_paths(self, stem_path, best?))
    }

    pub fn is_empty(&self) -> bool {
        self.find_lasso().is_none()
    }

    fn bfs_tree(&self, start: StateId, allowed: impl Fn(StateId) -> bool) -> (Vec<usize>, Vec<usize>) {
        let n = self.num_states();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for &i in self.outgoing(q) {
                let to = self.transition(i).to;
                if dist[to] == usize::MAX && allowed(to) {
                    dist[to] = dist[q] + 1;
                    parent[to] = i;
                    queue.push_back(to);
                }
            }
        }
        (dist, parent)
    }

    /// Membership of the ultimately periodic word `stem · cycle^ω`.
    pub fn accepts_lasso(&self, stem: &[L], cycle: &[L]) -> bool {
        assert!(!cycle.is_empty(), "lasso needs a nonempty loop");
        let word: Vec<&L> = stem.iter().chain(cycle).collect();
        let wrap = stem.len();
        let (nodes, adj) = explore((self.initial, 0usize), |&(q, pos)| {
            let next = if pos + 1 == word.len() { wrap } else { pos + 1 };
            self.outgoing(q)
                .iter()
                .map(|&i| self.transition(i))
                .filter(|t| t.label == *word[pos])
                .map(|t| (t.to, next))
                .collect()
        });
        let comp = scc(&adj);
        let cyclic = on_cycle(&adj, &comp);
        nodes
            .iter()
            .enumerate()
            .any(|(v, &(q, _))| cyclic[v] && self.is_accepting(q))
    }

    /// Keeps the reachable states that can reach an accepting cycle.
    pub fn trim(&self) -> Self {
        let adj = self.adjacency();
        let comp = scc(&adj);
        let cyclic = on_cycle(&adj, &comp);
        let reach = reachable_from(&adj, self.initial);
        let good: Vec<bool> = (0..self.num_states())
            .map(|q| reach[q] && cyclic[q] && self.is_accepting(q))
            .collect();
        // an accepting cycle may pass through non-accepting states: close
        // the good set under same-component membership
        let mut good_comp = vec![false; self.num_states()];
        for q in 0..self.num_states() {
            if good[q] {
                good_comp[comp[q]] = true;
            }
        }
        let live: Vec<bool> = (0..self.num_states())
            .map(|q| reach[q] && good_comp[comp[q]] && cyclic[q])
            .collect();
        let productive = can_reach(&adj, &live);
        let keep: Vec<bool> = (0..self.num_states())
            .map(|q| reach[q] && productive[q])
            .collect();
        self.restrict(&keep)
    }

    /// Keeps the states reachable from the initial state.
    pub fn reachable(&self) -> Self {
        let adj = self.adjacency();
        self.restrict(&reachable_from(&adj, self.initial))
    }
}

fn path_to<L: Label, T: Clone>(
    parent: &[usize],
    a: &BuchiAutomaton<L, T>,
    start: StateId,
    target: StateId,
) -> Vec<usize> {
    let mut path = Vec::new();
    let mut q = target;
    while q != start {
        let i = parent[q];
        path.push(i);
        q = a.transition(i).from;
    }
    path.reverse();
    path
}
