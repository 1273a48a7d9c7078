//! Tableau translation to a transition-based generalized Büchi automaton,
//! followed by counter degeneralization.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::buchi::BuchiAutomaton;
use crate::logic::Temporal;

use super::{Ltl, Valuation};

/// Negation normal form with release.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Nnf {
    True,
    False,
    Lit(usize, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

fn nnf(f: &Ltl, positive: bool) -> Nnf {
    let b = Box::new;
    match f {
        Temporal::Const(c) => {
            if *c == positive {
                Nnf::True
            } else {
                Nnf::False
            }
        }
        Temporal::Atom(i) => Nnf::Lit(*i, positive),
        Temporal::Not(a) => nnf(a, !positive),
        Temporal::Next(a) => Nnf::Next(b(nnf(a, positive))),
        Temporal::And(x, y) if positive => Nnf::And(b(nnf(x, true)), b(nnf(y, true))),
        Temporal::And(x, y) => Nnf::Or(b(nnf(x, false)), b(nnf(y, false))),
        Temporal::Until(x, y) if positive => Nnf::Until(b(nnf(x, true)), b(nnf(y, true))),
        Temporal::Until(x, y) => Nnf::Release(b(nnf(x, false)), b(nnf(y, false))),
    }
}

fn collect_untils(f: &Nnf, out: &mut BTreeSet<Nnf>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(a) => collect_untils(a, out),
        Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Nnf::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

/// One way of satisfying a set of obligations in the current step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Cover {
    lits: BTreeMap<usize, bool>,
    next: BTreeSet<Nnf>,
    postponed: BTreeSet<Nnf>,
}

fn expand(todo: Vec<Nnf>, cover: Cover, out: &mut BTreeSet<Cover>) {
    let mut todo = todo;
    let mut cover = cover;
    while let Some(f) = todo.pop() {
        match f {
            Nnf::True => {}
            Nnf::False => return,
            Nnf::Lit(i, v) => {
                if *cover.lits.entry(i).or_insert(v) != v {
                    return;
                }
            }
            Nnf::And(a, b) => {
                todo.push(*a);
                todo.push(*b);
            }
            Nnf::Next(a) => {
                cover.next.insert(*a);
            }
            Nnf::Or(a, b) => {
                let mut left = todo.clone();
                left.push(*a);
                expand(left, cover.clone(), out);
                todo.push(*b);
            }
            Nnf::Until(ref a, ref b) => {
                let mut now = todo.clone();
                now.push((**b).clone());
                expand(now, cover.clone(), out);
                cover.postponed.insert(f.clone());
                cover.next.insert(f.clone());
                todo.push((**a).clone());
            }
            Nnf::Release(ref a, ref b) => {
                let mut now = todo.clone();
                now.push((**a).clone());
                now.push((**b).clone());
                expand(now, cover.clone(), out);
                cover.next.insert(f.clone());
                todo.push((**b).clone());
            }
        }
    }
    out.insert(cover);
}

/// A Büchi automaton over valuations of `num_atoms` atoms accepting exactly
/// the words satisfying `f`.
pub fn translate(f: &Ltl, num_atoms: usize) -> BuchiAutomaton<Valuation> {
    let root = nnf(f, true);
    let mut untils = BTreeSet::new();
    collect_untils(&root, &mut untils);
    let untils: Vec<Nnf> = untils.into_iter().collect();
    let m = untils.len();
    let letters = Valuation::all(num_atoms);

    let start: BTreeSet<Nnf> = BTreeSet::from([root]);
    let mut out = BuchiAutomaton::new("a0", true);
    let mut order = vec![(start, m)];
    let mut ids: HashMap<(BTreeSet<Nnf>, usize), usize> = HashMap::from([(order[0].clone(), 0)]);
    let mut cache: HashMap<BTreeSet<Nnf>, BTreeSet<Cover>> = HashMap::new();
    let mut i = 0;
    while i < order.len() {
        let (set, level) = order[i].clone();
        let src = i;
        i += 1;
        let covers = cache
            .entry(set.clone())
            .or_insert_with(|| {
                let mut c = BTreeSet::new();
                let empty = Cover {
                    lits: BTreeMap::new(),
                    next: BTreeSet::new(),
                    postponed: BTreeSet::new(),
                };
                expand(set.iter().cloned().collect(), empty, &mut c);
                c
            })
            .clone();
        for cover in covers {
            // advance the counter past every until this transition fulfils
            let mut j = if level == m { 0 } else { level };
            while j < m && !cover.postponed.contains(&untils[j]) {
                j += 1;
            }
            let key = (cover.next.clone(), j);
            let dst = match ids.get(&key) {
                Some(&d) => d,
                None => {
                    let d = out.add_state(format!("a{}", order.len()), j == m);
                    ids.insert(key.clone(), d);
                    order.push(key);
                    d
                }
            };
            for &v in &letters {
                if cover.lits.iter().all(|(&a, &b)| v.get(a) == b) {
                    out.add_transition(src, v, dst, ());
                }
            }
        }
    }
    out
}
