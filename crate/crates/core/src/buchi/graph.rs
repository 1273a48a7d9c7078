//! Plain digraph utilities on adjacency lists.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// Strongly connected components (Tarjan, iterative). Returns the component
/// index of every node; components are numbered in reverse topological order.
pub fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Nodes lying on some cycle: members of a component with an internal edge.
pub fn on_cycle(adj: &[Vec<usize>], comp: &[usize]) -> Vec<bool> {
    let mut cyclic = vec![false; adj.len()];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            if comp[v] == comp[w] {
                cyclic[v] = true;
                cyclic[w] = true;
            }
        }
    }
    cyclic
}

pub fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Nodes that can reach a node in `targets`.
pub fn can_reach(adj: &[Vec<usize>], targets: &[bool]) -> Vec<bool> {
    let n = adj.len();
    let mut rev = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            rev[w].push(v);
        }
    }
    let mut seen = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| targets[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &w in &rev[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Builds the explicit graph reachable from `start` under `succ`.
pub fn explore<N: Clone + Eq + Hash>(
    start: N,
    mut succ: impl FnMut(&N) -> Vec<N>,
) -> (Vec<N>, Vec<Vec<usize>>) {
    let mut ids: HashMap<N, usize> = HashMap::new();
    let mut nodes = vec![start.clone()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
    ids.insert(start, 0);
    let mut i = 0;
    while i < nodes.len() {
        let node = nodes[i].clone();
        for next in succ(&node) {
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    nodes.push(next.clone());
                    adj.push(Vec::new());
                    ids.insert(next, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            adj[i].push(id);
        }
        i += 1;
    }
    (nodes, adj)
}
