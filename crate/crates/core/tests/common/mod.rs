//! Oracles and generators shared by the integration suites.
#![allow(dead_code)]

pub mod suites;

use std::collections::{BTreeSet, HashMap};

use hytsl::buchi::BuchiAutomaton;
use hytsl::logic::Temporal;
use hytsl::ltl::Valuation;
use hytsl::program::{parse_program_automaton, ProgramAutomaton, Statement, Universe};
use hytsl::terms::{evaluate, holds, Assignment, Value};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

/// All words over `alphabet` with length in `lo..=hi`.
pub fn words<L: Clone>(alphabet: &[L], lo: usize, hi: usize) -> Vec<Vec<L>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<L>> = vec![Vec::new()];
    for len in 0..=hi {
        if len >= lo {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(l.clone());
                    w
                })
            })
            .collect();
    }
    out
}

/// All lassos with stem length `<= stem` and loop length in `1..=cycle`.
pub fn lassos<L: Clone>(alphabet: &[L], stem: usize, cycle: usize) -> Vec<(Vec<L>, Vec<L>)> {
    let stems = words(alphabet, 0, stem);
    let cycles = words(alphabet, 1, cycle);
    stems
        .iter()
        .flat_map(|s| cycles.iter().map(move |c| (s.clone(), c.clone())))
        .collect()
}

/// Büchi membership of lassos, decided on the product of the automaton with
/// the positions of the lasso: the lasso is accepted iff a strongly
/// connected component reachable from the start contains an accepting
/// state and at least one edge.
pub struct Membership<'a, L, T> {
    a: &'a BuchiAutomaton<L, T>,
    succ: HashMap<(usize, &'a L), Vec<usize>>,
}

impl<'a, L: Eq + Clone + std::hash::Hash + Ord + std::fmt::Display + std::fmt::Debug, T: Clone> Membership<'a, L, T> {
    pub fn new(a: &'a BuchiAutomaton<L, T>) -> Self {
        let mut succ: HashMap<(usize, &'a L), Vec<usize>> = HashMap::new();
        for t in a.transitions() {
            succ.entry((t.from, &t.label)).or_default().push(t.to);
        }
        Membership { a, succ }
    }

    pub fn accepts(&self, stem: &[L], cycle: &[L]) -> bool {
        let word: Vec<&L> = stem.iter().chain(cycle).collect();
        let n = word.len();
        let next_pos = |p: usize| if p + 1 == n { stem.len() } else { p + 1 };
        let mut g: DiGraph<(usize, usize), ()> = DiGraph::new();
        let mut ids: HashMap<(usize, usize), NodeIndex> = HashMap::new();
        let start = (self.a.initial(), 0);
        ids.insert(start, g.add_node(start));
        let mut stack = vec![start];
        while let Some((q, p)) = stack.pop() {
            let from = ids[&(q, p)];
            for &q2 in self.succ.get(&(q, word[p])).map(Vec::as_slice).unwrap_or(&[]) {
                let key = (q2, next_pos(p));
                let to = *ids.entry(key).or_insert_with(|| {
                    stack.push(key);
                    g.add_node(key)
                });
                g.add_edge(from, to, ());
            }
        }
        tarjan_scc(&g).iter().any(|comp| {
            let nontrivial = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
            nontrivial && comp.iter().any(|&x| self.a.is_accepting(g[x].0))
        })
    }
}

pub fn accepts<L: Eq + Clone + std::hash::Hash + Ord + std::fmt::Display + std::fmt::Debug, T: Clone>(
    a: &BuchiAutomaton<L, T>,
    stem: &[L],
    cycle: &[L],
) -> bool {
    Membership::new(a).accepts(stem, cycle)
}

/// A random automaton over `alphabet` with `1..=max_states` states.
pub fn random_automaton<L: Clone + Eq + std::hash::Hash + Ord + std::fmt::Display + std::fmt::Debug>(
    r: &mut ChaCha8Rng,
    max_states: usize,
    alphabet: &[L],
    density: f64,
    all_accepting: bool,
) -> BuchiAutomaton<L> {
    let n = r.gen_range(1..=max_states);
    let acc = |r: &mut ChaCha8Rng| all_accepting || r.gen_bool(0.5);
    let first = acc(r);
    let mut a = BuchiAutomaton::new("s0", first);
    for q in 1..n {
        let x = acc(r);
        a.add_state(format!("s{q}"), x);
    }
    for p in 0..n {
        for l in alphabet {
            for q in 0..n {
                if r.gen_bool(density) {
                    a.add_transition(p, l.clone(), q, ());
                }
            }
        }
    }
    a
}

/// Values tried for free variables by the brute-force oracles.
pub const RANGE: std::ops::RangeInclusive<i64> = -8..=8;

/// Whether the basic statements can run in sequence from some state, by
/// enumerating pre-states and havoc values in [`RANGE`]. Framed cells are
/// read from the previous state and inputs from the current one.
pub fn window_feasible_brute(u: &Universe, stmts: &[Statement]) -> bool {
    let framed: Vec<_> = u.framed.iter().cloned().collect();
    let mut pre = Vec::new();
    for_each_assignment(&framed, &mut |a| pre.push(a.clone()));
    pre.iter().any(|a| run_from(u, a, stmts))
}

fn for_each_assignment(idents: &[hytsl::terms::Ident], f: &mut dyn FnMut(&Assignment)) {
    fn go(idents: &[hytsl::terms::Ident], cur: &mut Assignment, f: &mut dyn FnMut(&Assignment)) {
        match idents.split_first() {
            None => f(cur),
            Some((x, rest)) => {
                for v in RANGE {
                    cur.set(x.clone(), Value::int(v));
                    go(rest, cur, f);
                }
            }
        }
    }
    go(idents, &mut Assignment::new(), f)
}

fn run_from(u: &Universe, prev: &Assignment, stmts: &[Statement]) -> bool {
    !posts(u, prev, stmts, true).is_empty()
}

/// The states reachable by running the basic statements from `prev`, with
/// inputs and havoc values from [`RANGE`]. With `first` set, stops after
/// one is found.
pub fn posts(u: &Universe, prev: &Assignment, stmts: &[Statement], first: bool) -> Vec<Assignment> {
    let Some((s, rest)) = stmts.split_first() else {
        return vec![prev.clone()];
    };
    // inputs are fresh at every step; only the ones `s` reads matter
    let inputs: Vec<_> = s.reads().into_iter().filter(|x| u.inputs.contains(x)).collect();
    let mut out = Vec::new();
    for_each_assignment(&inputs, &mut |fresh| {
        if first && !out.is_empty() {
            return;
        }
        let mut view = prev.clone();
        for (x, v) in fresh.iter() {
            view.set(x.clone(), v.clone());
        }
        let nexts: Vec<Assignment> = match s {
            Statement::Assert(p) => {
                if holds(p, &view) == Ok(true) {
                    vec![view.clone()]
                } else {
                    vec![]
                }
            }
            Statement::Assign(c, t) => match evaluate(t, &view) {
                Ok(v) => vec![view.clone().with(c.clone(), v)],
                Err(_) => vec![],
            },
            Statement::Havoc(c) => RANGE.map(|v| view.clone().with(c.clone(), Value::int(v))).collect(),
            Statement::Seq(..) => panic!("statements must be flattened"),
        };
        for n in &nexts {
            out.extend(posts(u, n, rest, first));
            if first && !out.is_empty() {
                return;
            }
        }
    });
    out
}

/// Every assignment of [`RANGE`] values to `u`'s identifiers.
pub fn all_states(u: &Universe) -> Vec<Assignment> {
    let idents: Vec<_> = u.idents().cloned().collect();
    let mut out = Vec::new();
    for_each_assignment(&idents, &mut |a| out.push(a.clone()));
    out
}

/// Checks `steps` against the basic statements `stmts` one step at a time:
/// asserts hold and keep every framed cell, assignments store the value of
/// their right-hand side and keep the other cells, havocs keep the other
/// cells.
pub fn replay(u: &Universe, initial: &Assignment, steps: &[Assignment], stmts: &[Statement]) -> Result<(), String> {
    if steps.len() != stmts.len() {
        return Err(format!("{} steps for {} statements", steps.len(), stmts.len()));
    }
    let mut prev = initial;
    for (t, (cur, s)) in steps.iter().zip(stmts).enumerate() {
        let mut view = Assignment::new();
        for c in &u.framed {
            view.set(c.clone(), prev.get(c).map_err(|e| e.to_string())?.clone());
        }
        for i in &u.inputs {
            view.set(i.clone(), cur.get(i).map_err(|e| e.to_string())?.clone());
        }
        let written: Option<&hytsl::terms::Ident> = match s {
            Statement::Assert(p) => {
                if holds(p, &view) != Ok(true) {
                    return Err(format!("step {t}: `{s}` fails"));
                }
                None
            }
            Statement::Assign(c, e) => {
                if evaluate(e, &view).ok().as_ref() != cur.get(c).ok() {
                    return Err(format!("step {t}: `{s}` stores a different value"));
                }
                Some(c)
            }
            Statement::Havoc(c) => Some(c),
            Statement::Seq(..) => return Err(format!("step {t}: composite statement")),
        };
        for c in &u.framed {
            if Some(c) != written && prev.get(c).ok() != cur.get(c).ok() {
                return Err(format!("step {t}: `{s}` changes {c}"));
            }
        }
        prev = cur;
    }
    Ok(())
}

/// Naive LTL semantics on `stem · cycle^ω`, unrolling the word: an until is
/// decided within one pass over every distinct suffix.
pub fn ltl_holds(f: &Temporal<usize>, stem: &[Valuation], cycle: &[Valuation], t: usize) -> bool {
    let letter = |i: usize| {
        if i < stem.len() {
            stem[i]
        } else {
            cycle[(i - stem.len()) % cycle.len()]
        }
    };
    match f {
        Temporal::Const(b) => *b,
        Temporal::Atom(i) => letter(t).get(*i),
        Temporal::Not(a) => !ltl_holds(a, stem, cycle, t),
        Temporal::And(a, b) => ltl_holds(a, stem, cycle, t) && ltl_holds(b, stem, cycle, t),
        Temporal::Next(a) => ltl_holds(a, stem, cycle, t + 1),
        Temporal::Until(a, b) => {
            for u in t..t + stem.len() + cycle.len() + 1 {
                if ltl_holds(b, stem, cycle, u) {
                    return true;
                }
                if !ltl_holds(a, stem, cycle, u) {
                    return false;
                }
            }
            false
        }
    }
}

/// The four labels of the k-feasibility suite.
pub const COUNTER_LABELS: [&str; 4] = ["n := n - 1", "n := 1", "assert(n >= 0)", "n := *"];

/// A random program automaton over [`COUNTER_LABELS`] with every state
/// accepting.
pub fn random_counter_program(r: &mut ChaCha8Rng) -> ProgramAutomaton {
    let n = r.gen_range(1..=3);
    let mut text = String::from("cells: n\n");
    for q in 0..n {
        text.push_str(&format!("state q{q}{} accepting\n", if q == 0 { " initial" } else { "" }));
    }
    for p in 0..n {
        for q in 0..n {
            for l in COUNTER_LABELS {
                if r.gen_bool(0.25) {
                    text.push_str(&format!("trans q{p} -> q{q} : {l}\n"));
                }
            }
        }
    }
    parse_program_automaton(&text).unwrap()
}

pub fn stmt_set(p: &ProgramAutomaton) -> BTreeSet<Statement> {
    p.automaton.labels()
}
