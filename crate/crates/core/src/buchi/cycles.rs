//! Simple-cycle enumeration (Johnson's algorithm), expanded over parallel
//! transitions.

use std::collections::BTreeSet;

use super::graph::scc;
use super::{BuchiAutomaton, Label, StateId};

/// Elementary circuits of a digraph as state sequences, each starting at its
/// smallest state, in lexicographic order of discovery. Stops after `limit`
/// circuits; the flag reports that more circuits exist.
pub fn elementary_circuits(adj: &[Vec<usize>], limit: usize) -> (Vec<Vec<usize>>, bool) {
    let n = adj.len();
    let cap = limit.saturating_add(1);
    let mut out = Vec::new();
    for s in 0..n {
        // subgraph induced by vertices >= s, restricted to the component of s
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if v < s {
                    Vec::new()
                } else {
                    adj[v].iter().copied().filter(|&w| w >= s).collect()
                }
            })
            .collect();
        let comp = scc(&sub);
        let in_comp: Vec<bool> = (0..n).map(|v| v >= s && comp[v] == comp[s]).collect();
        let local: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if !in_comp[v] {
                    return Vec::new();
                }
                let set: BTreeSet<usize> = sub[v].iter().copied().filter(|&w| in_comp[w]).collect();
                set.into_iter().collect()
            })
            .collect();
        if local[s].is_empty() {
            continue;
        }
        let mut search = Search {
            adj: &local,
            blocked: vec![false; n],
            b: vec![BTreeSet::new(); n],
            stack: Vec::new(),
            out: &mut out,
            limit: cap,
        };
        search.circuit(s, s);
        if out.len() > limit {
            out.truncate(limit);
            return (out, true);
        }
    }
    (out, false)
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    blocked: Vec<bool>,
    b: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    out: &'a mut Vec<Vec<usize>>,
    limit: usize,
}

impl Search<'_> {
    fn unblock(&mut self, u: usize) {
        let mut work = vec![u];
        while let Some(v) = work.pop() {
            if !self.blocked[v] {
                continue;
            }
            self.blocked[v] = false;
            let waiting: Vec<usize> = std::mem::take(&mut self.b[v]).into_iter().collect();
            work.extend(waiting);
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> bool {
        if self.out.len() >= self.limit {
            return true;
        }
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for k in 0..self.adj[v].len() {
            let w = self.adj[v][k];
            if w == s {
                self.out.push(self.stack.clone());
                found = true;
                if self.out.len() >= self.limit {
                    break;
                }
            } else if !self.blocked[w] && self.circuit(w, s) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            let adj = self.adj;
            for &w in &adj[v] {
                self.b[w].insert(v);
            }
        }
        self.stack.pop();
        found
    }
}

impl<L: Label, T: Clone> BuchiAutomaton<L, T> {
    /// Simple cycles as transition-index sequences. A state circuit with
    /// parallel transitions yields one cycle per choice of transitions.
    /// Self-loops are included. Returns at most `limit` cycles and whether
    /// the enumeration was cut short.
    pub fn simple_cycles(&self, limit: usize) -> (Vec<Vec<usize>>, bool) {
        let adj = self.adjacency();
        let (circuits, cut) = elementary_circuits(&adj, limit);
        let mut out = Vec::new();
        let mut truncated = false;
        for circuit in circuits {
            let k = circuit.len();
            let options: Vec<Vec<usize>> = (0..k)
                .map(|j| self.edges_between(circuit[j], circuit[(j + 1) % k]))
                .collect();
            let mut pick = vec![0usize; k];
            'expand: loop {
                if out.len() >= limit {
                    truncated = true;
                    break 'expand;
                }
                out.push((0..k).map(|j| options[j][pick[j]]).collect());
                let mut j = k;
                loop {
                    if j == 0 {
                        break 'expand;
                    }
                    j -= 1;
                    pick[j] += 1;
                    if pick[j] < options[j].len() {
                        break;
                    }
                    pick[j] = 0;
                }
            }
            if truncated {
                break;
            }
        }
        (out, truncated || cut)
    }

    fn edges_between(&self, p: StateId, q: StateId) -> Vec<usize> {
        self.outgoing(p)
            .iter()
            .copied()
            .filter(|&i| self.transition(i).to == q)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::build;

    #[test]
    fn self_loop_is_one_cycle() {
        let a = build(1, &[0], &[(0, 'a', 0)]);
        assert_eq!(a.simple_cycles(100).0.len(), 1);
    }

    #[test]
    fn two_cycle() {
        let a = build(2, &[0], &[(0, 'a', 1), (1, 'b', 0)]);
        assert_eq!(a.simple_cycles(100).0, vec![vec![0, 1]]);
    }

    #[test]
    fn complete_digraph_on_three() {
        let mut edges = Vec::new();
        for p in 0..3 {
            for q in 0..3 {
                if p != q {
                    edges.push((p, 'a', q));
                }
            }
        }
        let a = build(3, &[0], &edges);
        assert_eq!(a.simple_cycles(100).0.len(), 5);
    }

    #[test]
    fn parallel_edges_expand() {
        let a = build(2, &[0], &[(0, 'a', 1), (0, 'b', 1), (1, 'c', 0)]);
        assert_eq!(a.simple_cycles(100).0.len(), 2);
    }

    #[test]
    fn limit_truncates() {
        let a = build(2, &[0], &[(0, 'a', 1), (0, 'b', 1), (1, 'c', 0), (0, 'd', 0)]);
        let (c, cut) = a.simple_cycles(2);
        assert_eq!(c.len(), 2);
        assert!(cut);
    }
}
