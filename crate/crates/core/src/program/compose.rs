//! Self-composition, `combine` and the combined product.

use std::collections::{BTreeSet, HashMap};

use crate::buchi::{BuchiAutomaton, Transition};
use crate::logic::AtomSet;
use crate::ltl::Valuation;
use crate::terms::{Ident, Op, Term, Value};

use super::{ProgramAutomaton, Statement, Universe};

/// Where a transition of a composed automaton came from: the per-trace
/// statements (already renamed) and, after a combined product, the formula
/// letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub parts: Vec<Statement>,
    pub valuation: Option<Valuation>,
}

/// The snapshot cell for the `j`-th update term.
pub fn tmp_cell(j: usize) -> Ident {
    Ident::cell(format!("__tmp{j}"))
}

/// The n-fold self-composition over the given trace names. States are all
/// tuples of states of `p`, named by concatenation; a transition runs one
/// transition of every copy in trace order.
pub fn self_compose(p: &ProgramAutomaton, traces: &[String]) -> ProgramAutomaton<Provenance> {
    let parts: Vec<(&ProgramAutomaton, &str)> = traces.iter().map(|t| (p, t.as_str())).collect();
    compose(&parts)
}

/// The synchronous product of several program automata, each renamed to
/// its own trace. [`self_compose`] is the case of identical components.
pub fn compose(components: &[(&ProgramAutomaton, &str)]) -> ProgramAutomaton<Provenance> {
    let n = components.len();
    let sizes: Vec<usize> = components.iter().map(|(p, _)| p.automaton.num_states()).collect();
    let total: usize = sizes.iter().product();
    let tuple = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0; n];
        for k in (0..n).rev() {
            t[k] = idx % sizes[k];
            idx /= sizes[k];
        }
        t
    };
    let index = |t: &[usize]| t.iter().zip(&sizes).fold(0, |acc, (&s, &q)| acc * q + s);
    let name = |t: &[usize]| {
        t.iter()
            .zip(components)
            .map(|(&s, (p, _))| p.automaton.name(s))
            .collect::<String>()
    };
    let accepting = |t: &[usize]| t.iter().zip(components).all(|(&s, (p, _))| p.automaton.is_accepting(s));

    let first = tuple(0);
    let mut out = BuchiAutomaton::new(name(&first), accepting(&first));
    for idx in 1..total {
        let t = tuple(idx);
        out.add_state(name(&t), accepting(&t));
    }
    let init: Vec<usize> = components.iter().map(|(p, _)| p.automaton.initial()).collect();
    out.set_initial(index(&init));

    for idx in 0..total {
        let t = tuple(idx);
        let options: Vec<&[usize]> = t
            .iter()
            .zip(components)
            .map(|(&s, (p, _))| p.automaton.outgoing(s))
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut pick = vec![0usize; n];
        'odometer: loop {
            let chosen: Vec<&Transition<Statement>> = (0..n)
                .map(|k| components[k].0.automaton.transition(options[k][pick[k]]))
                .collect();
            let parts: Vec<Statement> = chosen
                .iter()
                .zip(components)
                .map(|(t, (_, tr))| t.label.on_trace(tr))
                .collect();
            let target: Vec<usize> = chosen.iter().map(|t| t.to).collect();
            out.add_transition(
                idx,
                Statement::sequence(parts.clone()),
                index(&target),
                Provenance {
                    parts,
                    valuation: None,
                },
            );
            let mut k = n;
            loop {
                if k == 0 {
                    break 'odometer;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    break;
                }
                pick[k] = 0;
            }
        }
    }

    let universe = components
        .iter()
        .map(|(p, tr)| p.universe.on_trace(tr))
        .fold(Universe::default(), |acc, u| acc.union(&u));
    ProgramAutomaton::new(out, universe)
}

/// `save_values; s; new_inputs; check_preds; check_updates`, except that
/// the input havocs move in front of `s` when `s` reads an input, so the
/// statement and the predicates see the same input values.
pub fn combine(s: &Statement, l: Valuation, atoms: &AtomSet, inputs: &BTreeSet<Ident>) -> Statement {
    let mut parts: Vec<Statement> = atoms
        .updates
        .iter()
        .enumerate()
        .map(|(j, u)| Statement::assign(tmp_cell(j), u.source.clone()))
        .collect();
    let havocs: Vec<Statement> = inputs.iter().cloned().map(Statement::havoc).collect();
    if s.reads().iter().any(|id| inputs.contains(id)) {
        parts.extend(havocs);
        parts.extend(s.flatten());
    } else {
        parts.extend(s.flatten());
        parts.extend(havocs);
    }
    let preds = atoms
        .predicates
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if l.get(i) {
                p.term().clone()
            } else {
                Term::not(p.term().clone())
            }
        })
        .collect();
    parts.push(Statement::assert_term(Term::conjunction(preds)));
    let np = atoms.predicates.len();
    let upds = atoms
        .updates
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let op = if l.get(np + j) { Op::Eq } else { Op::Ne };
            Term::binary(op, Term::var(u.target.clone()), Term::var(tmp_cell(j)))
        })
        .collect();
    parts.push(Statement::assert_term(Term::conjunction(upds)));
    Statement::sequence(parts)
}

/// The combined product over the reachable part of `P × A`. Inputs of `p`
/// become cells of the result, together with one snapshot cell per update
/// term.
pub fn combined_product(
    p: &ProgramAutomaton<Provenance>,
    a: &BuchiAutomaton<Valuation>,
    atoms: &AtomSet,
) -> ProgramAutomaton<Provenance> {
    let pa = &p.automaton;
    let inputs = &p.universe.inputs;
    let name = |x: usize, y: usize| format!("{}/{}", pa.name(x), a.name(y));
    let start = (pa.initial(), a.initial());
    let mut out = BuchiAutomaton::new(name(start.0, start.1), a.is_accepting(start.1));
    let mut ids = HashMap::from([(start, 0usize)]);
    let mut order = vec![start];
    let mut i = 0;
    while i < order.len() {
        let (x, y) = order[i];
        let src = i;
        i += 1;
        for &ti in pa.outgoing(x) {
            let t = pa.transition(ti);
            for &ui in a.outgoing(y) {
                let u = a.transition(ui);
                let key = (t.to, u.to);
                let dst = *ids.entry(key).or_insert_with(|| {
                    order.push(key);
                    out.add_state(name(key.0, key.1), a.is_accepting(key.1))
                });
                let label = combine(&t.label, u.label, atoms, inputs);
                let tag = Provenance {
                    parts: t.tag.parts.clone(),
                    valuation: Some(u.label),
                };
                out.add_transition(src, label, dst, tag);
            }
        }
    }

    let tmps: Vec<Ident> = (0..atoms.updates.len()).map(tmp_cell).collect();
    let mut framed = p.universe.framed.clone();
    framed.extend(inputs.iter().cloned());
    framed.extend(tmps.iter().cloned());
    let mut initial = p.universe.initial.clone();
    for t in &tmps {
        initial.set(t.clone(), Value::int(0));
    }
    for id in inputs {
        if !initial.contains(id) {
            initial.set(id.clone(), Value::int(0));
        }
    }
    let universe = Universe {
        framed,
        inputs: BTreeSet::new(),
        initial,
    };
    ProgramAutomaton::new(out, universe)
}

/// Relabels every transition with the sequence of its first `m` parts.
/// `target` is the universe of the `m`-fold self-composition.
pub fn universal_projection(
    a: &ProgramAutomaton<Provenance>,
    m: usize,
    target: &Universe,
) -> ProgramAutomaton<Provenance> {
    let automaton = a.automaton.relabel(|t| {
        let parts: Vec<Statement> = t.tag.parts[..m].to_vec();
        Some((
            Statement::sequence(parts.clone()),
            Provenance {
                parts,
                valuation: t.tag.valuation,
            },
        ))
    });
    ProgramAutomaton::new(automaton, target.clone())
}
