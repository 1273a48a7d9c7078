//! Bounded search for an existential partner of a ∀∃ counterexample.

use std::collections::BTreeSet;

use crate::feasibility::{
    find_feasible_lasso, prune_by_intervals, remove_infeasible_cycles, remove_k_infeasibility,
    LassoSearch, Solver,
};
use crate::logic::{ltl_skeleton, TemporalFormula};
use crate::ltl::translate;
use crate::program::{combined_product, compose, ProgramAutomaton, Statement};

use super::{CheckOptions, TraceWitness};

const MAX_CANDIDATES: usize = 5_000;

/// Outcome of pairing the universal traces of a counterexample with every
/// bounded lasso of the system as the existential trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerCheck {
    pub bound: usize,
    pub candidates: usize,
    /// Candidates whose product with the formula was pruned to nothing.
    pub refuted: usize,
    /// Candidates with a feasible product lasso.
    pub partners: usize,
    pub truncated: bool,
    pub skipped: Option<String>,
}

impl PartnerCheck {
    pub fn skipped(bound: usize, why: &str) -> Self {
        PartnerCheck {
            bound,
            candidates: 0,
            refuted: 0,
            partners: 0,
            truncated: false,
            skipped: Some(why.to_string()),
        }
    }

    /// Every candidate partner was refuted.
    pub fn confirmed(&self) -> bool {
        self.skipped.is_none() && !self.truncated && self.refuted == self.candidates
    }
}

/// All lassos of `p` whose stem and loop are walks of at most `bound`
/// transitions, up to `cap` of them. The flag reports truncation.
pub fn enumerate_lassos(
    p: &ProgramAutomaton,
    bound: usize,
    cap: usize,
) -> (Vec<(Vec<Statement>, Vec<Statement>)>, bool) {
    let a = &p.automaton;
    let walks_from = |q: usize| -> Vec<(Vec<Statement>, usize)> {
        let mut out = vec![(Vec::new(), q)];
        let mut layer = out.clone();
        for _ in 0..bound {
            let mut next = Vec::new();
            for (w, end) in &layer {
                for &i in a.outgoing(*end) {
                    let t = a.transition(i);
                    let mut w2 = w.clone();
                    w2.push(t.label.clone());
                    next.push((w2, t.to));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (stem, q) in walks_from(a.initial()) {
        for (cycle, end) in walks_from(q) {
            if end != q || cycle.is_empty() || !a.is_accepting(q) {
                continue;
            }
            if seen.insert((stem.clone(), cycle.clone())) {
                if out.len() == cap {
                    return (out, true);
                }
                out.push((stem.clone(), cycle));
            }
        }
    }
    (out, false)
}

pub(super) fn check_partners(
    p: &ProgramAutomaton,
    core: &TemporalFormula,
    traces: &[String],
    universal: &[TraceWitness],
    opts: &CheckOptions,
    solver: &dyn Solver,
) -> PartnerCheck {
    let bound = opts.partner_bound;
    let (ltl, atoms) = ltl_skeleton(core);
    let aut = translate(&ltl, atoms.len());
    let sigmas: Vec<ProgramAutomaton> = universal
        .iter()
        .map(|t| ProgramAutomaton::lasso(p.universe.clone(), &t.stem, &t.cycle))
        .collect();
    let (candidates, truncated) = enumerate_lassos(p, bound, MAX_CANDIDATES);
    let mut check = PartnerCheck {
        bound,
        candidates: candidates.len(),
        refuted: 0,
        partners: 0,
        truncated,
        skipped: None,
    };
    let partner_trace = traces.last().expect("an existential trace").as_str();
    for (stem, cycle) in &candidates {
        let tau = ProgramAutomaton::lasso(p.universe.clone(), stem, cycle);
        let mut comps: Vec<(&ProgramAutomaton, &str)> =
            sigmas.iter().zip(traces).map(|(s, t)| (s, t.as_str())).collect();
        comps.push((&tau, partner_trace));
        let prod = combined_product(&compose(&comps), &aut, &atoms);
        let pruned = prune_by_intervals(&prod);
        let Ok(pruned) = remove_k_infeasibility(&pruned, opts.k.max(2), solver, opts.complement_budget) else {
            continue;
        };
        let Ok(removal) = remove_infeasible_cycles(
            &pruned,
            opts.cycle_iters.max(2),
            solver,
            opts.cycle_limit,
            opts.complement_budget,
        ) else {
            continue;
        };
        if removal.automaton.automaton.is_empty() {
            check.refuted += 1;
        } else if let LassoSearch::Found(_) = find_feasible_lasso(&removal.automaton, opts.lasso_bounds(), solver) {
            check.partners += 1;
        }
    }
    check
}
