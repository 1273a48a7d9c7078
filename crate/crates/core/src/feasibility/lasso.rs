//! Search for a lasso of a program automaton that some computation follows.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::buchi::StateId;
use crate::program::{matches_run, matches_step, ProgramAutomaton, Statement, Universe};
use crate::terms::{holds, Assignment, Ident, PredicateTerm, Term};

use super::encode::{Encoder, Init};
use super::smt::{Query, Solver, SolverResult};

/// A concrete computation along a lasso, one assignment per basic
/// statement. With `periodic` set, the `cycle` states repeat forever;
/// otherwise they cover `iterations` passes of a loop that can always be
/// executed again: either it has no assertions, or `recurrence` is a
/// condition on the framed cells that holds at the loop start, enables a
/// pass, and is re-established by every pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub initial: Assignment,
    pub stem: Vec<Assignment>,
    pub cycle: Vec<Assignment>,
    pub stem_labels: Vec<Statement>,
    pub cycle_labels: Vec<Statement>,
    pub iterations: usize,
    pub periodic: bool,
    pub recurrence: Option<Term>,
}

/// Whether a basic statement can block: an assertion other than `true`.
fn can_block(s: &Statement) -> bool {
    matches!(s, Statement::Assert(p) if *p.term() != Term::bool(true))
}

impl Witness {
    fn basic(labels: &[Statement]) -> Vec<Statement> {
        labels.iter().flat_map(|s| s.flatten()).collect()
    }

    pub fn stem_statements(&self) -> Vec<Statement> {
        Self::basic(&self.stem_labels)
    }

    /// The loop statements repeated over the recorded passes.
    pub fn cycle_statements(&self) -> Vec<Statement> {
        let one = Self::basic(&self.cycle_labels);
        (0..self.iterations).flat_map(|_| one.clone()).collect()
    }

    /// The states at the end of each label, as `(stem, cycle)`.
    pub fn label_states(&self) -> (Vec<Assignment>, Vec<Assignment>) {
        let cut = |labels: &[Statement], states: &[Assignment], reps: usize| {
            let mut out = Vec::new();
            let mut k = 0;
            for _ in 0..reps {
                for l in labels {
                    k += l.flatten().len();
                    out.push(states[k - 1].clone());
                }
            }
            out
        };
        (
            cut(&self.stem_labels, &self.stem, 1),
            cut(&self.cycle_labels, &self.cycle, self.iterations),
        )
    }

    /// Replays the witness against the statement semantics.
    pub fn is_valid(&self, u: &Universe) -> bool {
        let stmts: Vec<Statement> = self
            .stem_statements()
            .into_iter()
            .chain(self.cycle_statements())
            .collect();
        let steps: Vec<Assignment> = self.stem.iter().chain(&self.cycle).cloned().collect();
        if self.cycle.is_empty() || !matches_run(u, &self.initial, &steps, &stmts) {
            return false;
        }
        if self.periodic {
            let first = &self.cycle_statements()[0];
            let last = self.cycle.last().expect("nonempty");
            let framed = |a: &Assignment| a.restrict(|x| u.framed.contains(x));
            let before = self.stem.last().unwrap_or(&self.initial);
            framed(before) == framed(last) && matches_step(u, last, &self.cycle[0], first)
        } else if let Some(g) = &self.recurrence {
            let start = self.stem.last().unwrap_or(&self.initial);
            holds(&PredicateTerm(g.clone()), start) == Ok(true)
        } else {
            // without a return to the loop start the loop must be free of
            // assertions so that every further pass can be executed
            !self.cycle_statements().iter().any(can_block)
        }
    }
}

/// A lasso of the searched automaton with a witness computation.
#[derive(Debug, Clone)]
pub struct FeasibleLasso<T> {
    pub stem: Vec<(Statement, T)>,
    pub cycle: Vec<(Statement, T)>,
    pub stem_states: Vec<String>,
    pub cycle_states: Vec<String>,
    pub witness: Witness,
}

#[derive(Debug, Clone)]
pub enum LassoSearch<T> {
    Found(FeasibleLasso<T>),
    /// The automaton accepts no word at all.
    Empty,
    /// Every enumerated lasso was refuted or undecided, but the
    /// enumeration is bounded.
    Exhausted {
        checked: usize,
        unknown: usize,
        truncated: bool,
    },
}

/// Bounds of the lasso enumeration.
#[derive(Debug, Clone, Copy)]
pub struct LassoBounds {
    pub stem_bound: usize,
    pub cycle_limit: usize,
    pub max_lassos: usize,
}

impl Default for LassoBounds {
    fn default() -> Self {
        LassoBounds {
            stem_bound: 8,
            cycle_limit: 2_000,
            max_lassos: 2_000,
        }
    }
}

/// Walks from the initial state to `target` with at most `bound`
/// transitions, shortest first. States may repeat. Stops after `cap` walks.
fn stem_walks<T: Clone>(p: &ProgramAutomaton<T>, target: StateId, bound: usize, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let a = &p.automaton;
    // distance of every state to `target`
    let mut dist = vec![usize::MAX; a.num_states()];
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); a.num_states()];
    for t in a.transitions() {
        preds[t.to].push(t.from);
    }
    dist[target] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(q) = queue.pop_front() {
        for &r in &preds[q] {
            if dist[r] == usize::MAX {
                dist[r] = dist[q] + 1;
                queue.push_back(r);
            }
        }
    }
    let mut out = Vec::new();
    let mut truncated = false;
    let mut layer: Vec<(StateId, Vec<usize>)> = vec![(a.initial(), Vec::new())];
    for len in 0..=bound {
        for (q, path) in &layer {
            if *q == target {
                if out.len() >= cap {
                    return (out, true);
                }
                out.push(path.clone());
            }
        }
        if len == bound {
            break;
        }
        let mut next = Vec::new();
        for (q, path) in &layer {
            for &i in a.outgoing(*q) {
                let to = a.transition(i).to;
                if dist[to] <= bound - len - 1 {
                    let mut path = path.clone();
                    path.push(i);
                    next.push((to, path));
                }
            }
        }
        if next.len() > cap.saturating_mul(8) {
            next.truncate(cap.saturating_mul(8));
            truncated = true;
        }
        layer = next;
    }
    (out, truncated)
}

/// For a loop without havocs and input reads, the conjunction `G` of its
/// assertions over the pre-state. Returns `G` when `G(x)` implies
/// `G(F(x))` for the loop's state transformer `F`, so that a state
/// satisfying `G` runs the loop forever.
fn recurrent_guard(u: &Universe, cycle: &[Statement], solver: &dyn Solver) -> Option<Term> {
    let stmts: Vec<Statement> = cycle.iter().flat_map(|s| s.flatten()).collect();
    let mut map: BTreeMap<Ident, Term> = BTreeMap::new();
    let mut guards = Vec::new();
    for s in &stmts {
        if s.reads().iter().any(|x| u.inputs.contains(x)) {
            return None;
        }
        let sub = |t: &Term| t.substitute(&|x| map.get(x).cloned());
        match s {
            Statement::Assert(p) => guards.push(sub(p.term())),
            Statement::Assign(c, t) => {
                let v = sub(t);
                map.insert(c.clone(), v);
            }
            _ => return None,
        }
    }
    let g = Term::conjunction(guards);
    let next = g.substitute(&|x| map.get(x).cloned());
    let mut q = Query::new();
    for x in &u.framed {
        q.declare(x.clone());
    }
    q.assert(g.clone());
    q.assert(Term::not(next));
    solver.check(&q).is_unsat().then_some(g)
}

/// Result of checking one lasso.
#[derive(Debug, Clone)]
pub enum Attempt {
    Found(Witness),
    NoWitness,
    Unknown,
}

/// Checks a single lasso `stem · cycle^ω` from the initial assignment.
/// `NoWitness` means no sufficient condition applies, not that the lasso
/// is infeasible.
pub fn check_lasso(u: &Universe, stem: &[Statement], cycle: &[Statement], solver: &dyn Solver) -> Attempt {
    let mut unknown = false;
    let stem_steps: usize = stem.iter().map(|s| s.flatten().len()).sum();
    let loop_steps: usize = cycle.iter().map(|s| s.flatten().len()).sum();
    let assert_free = !cycle.iter().flat_map(|s| s.flatten()).any(|s| can_block(&s));
    let mut attempts: Vec<(usize, bool)> = vec![(1, true), (2, true)];
    let mut recurrence = None;
    if assert_free {
        attempts.push((2, false));
    } else if let Some(g) = recurrent_guard(u, cycle, solver) {
        recurrence = Some(g);
        attempts.push((2, false));
    }
    for (reps, periodic) in attempts {
        let mut e = Encoder::new(u, Init::Pinned);
        for s in stem {
            e.push(s);
        }
        for _ in 0..reps {
            for s in cycle {
                e.push(s);
            }
        }
        if periodic {
            e.assert_same_state(stem_steps, stem_steps + reps * loop_steps);
        }
        match solver.check(&e.query) {
            SolverResult::Sat(m) => {
                let (initial, mut steps) = e.decode(&m);
                let cyc = steps.split_off(stem_steps);
                let w = Witness {
                    initial,
                    stem: steps,
                    cycle: cyc,
                    stem_labels: stem.to_vec(),
                    cycle_labels: cycle.to_vec(),
                    iterations: reps,
                    periodic,
                    recurrence: if periodic { None } else { recurrence.clone() },
                };
                if w.is_valid(u) {
                    return Attempt::Found(w);
                }
                unknown = true;
            }
            SolverResult::Unsat => {}
            SolverResult::Unknown(_) => unknown = true,
        }
    }
    if unknown {
        Attempt::Unknown
    } else {
        Attempt::NoWitness
    }
}

/// Looks for an accepted lasso with a computation, shortest first. Stems
/// are walks of at most `stem_bound` transitions, loops are simple cycles
/// through an accepting state. A loop counts as executable forever when a
/// pass returns to the framed values it started with (repeating the loop
/// once or twice), when it contains no assertion, or when it preserves its
/// own guard.
pub fn find_feasible_lasso<T: Clone>(
    p: &ProgramAutomaton<T>,
    bounds: LassoBounds,
    solver: &dyn Solver,
) -> LassoSearch<T> {
    let trimmed = p.with_automaton(p.automaton.trim());
    let a = &trimmed.automaton;
    if a.is_empty() {
        return LassoSearch::Empty;
    }
    let (cycles, mut truncated) = a.simple_cycles(bounds.cycle_limit);
    let mut stems: HashMap<StateId, Vec<Vec<usize>>> = HashMap::new();
    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for cyc in &cycles {
        if !cyc.iter().any(|&i| a.is_accepting(a.transition(i).from)) {
            continue;
        }
        for r in 0..cyc.len() {
            let rotated: Vec<usize> = cyc[r..].iter().chain(&cyc[..r]).copied().collect();
            let entry = a.transition(rotated[0]).from;
            let paths = stems.entry(entry).or_insert_with(|| {
                let (paths, cut) = stem_walks(&trimmed, entry, bounds.stem_bound, bounds.max_lassos);
                truncated |= cut;
                paths
            });
            for s in paths.iter() {
                candidates.push((s.clone(), rotated.clone()));
            }
        }
    }
    candidates.sort_by_key(|(s, c)| (s.len() + c.len(), s.len()));
    if candidates.len() > bounds.max_lassos {
        candidates.truncate(bounds.max_lassos);
        truncated = true;
    }
    let labels = |path: &[usize]| -> Vec<Statement> {
        path.iter().map(|&i| a.transition(i).label.clone()).collect()
    };
    let mut unknown = 0;
    for (checked, (stem, cycle)) in candidates.iter().enumerate() {
        match check_lasso(&trimmed.universe, &labels(stem), &labels(cycle), solver) {
            Attempt::Found(witness) => {
                let tagged = |path: &[usize]| -> Vec<(Statement, T)> {
                    path.iter()
                        .map(|&i| {
                            let t = a.transition(i);
                            (t.label.clone(), t.tag.clone())
                        })
                        .collect()
                };
                let names = |path: &[usize]| -> Vec<String> {
                    path.iter().map(|&i| a.name(a.transition(i).from).to_string()).collect()
                };
                let _ = checked;
                return LassoSearch::Found(FeasibleLasso {
                    stem: tagged(stem),
                    cycle: tagged(cycle),
                    stem_states: names(stem),
                    cycle_states: names(cycle),
                    witness,
                });
            }
            Attempt::NoWitness => {}
            Attempt::Unknown => unknown += 1,
        }
    }
    LassoSearch::Exhausted {
        checked: candidates.len(),
        unknown,
        truncated,
    }
}
