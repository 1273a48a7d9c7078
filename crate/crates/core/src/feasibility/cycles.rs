//! Infeasible cycles: local refutation, ranking functions, the automaton
//! `A_ϱ` of words ending in `ϱ^ω`, and the removal loop.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::buchi::{difference, BuchiAutomaton, BuchiError};
use crate::program::{ProgramAutomaton, Statement, Universe};
use crate::terms::{Assignment, Ident, Op, Term, Value};

use super::encode::{Encoder, Init};
use super::smt::{unsat_core, Query, Solver, SolverResult};

/// `Σ coeffs[x]·x + constant` over framed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingFunction {
    pub coeffs: BTreeMap<Ident, i64>,
    pub constant: i64,
}

impl RankingFunction {
    fn term_over(&self, vars: &BTreeMap<Ident, Ident>) -> Term {
        let mut acc = Term::int(self.constant);
        for (x, &c) in &self.coeffs {
            let v = Term::var(vars[x].clone());
            let part = match c {
                1 => v,
                -1 => Term::apply(Op::Neg, vec![v]),
                _ => Term::binary(Op::Mul, Term::int(c), v),
            };
            acc = Term::binary(Op::Add, acc, part);
        }
        acc
    }

    pub fn eval(&self, a: &Assignment) -> Option<BigInt> {
        let mut acc = BigInt::from(self.constant);
        for (x, &c) in &self.coeffs {
            acc += a.get(x).ok()?.as_int()? * c;
        }
        Some(acc)
    }
}

impl fmt::Display for RankingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, &c) in &self.coeffs {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            let sign = if self.constant < 0 { "-" } else { "+" };
            write!(f, " {sign} {}", self.constant.abs())
        } else {
            Ok(())
        }
    }
}

/// Why a cycle cannot repeat forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// One pass is already unsatisfiable; the core lists the responsible
    /// constraints.
    Local { core: Vec<Term> },
    /// The function is bounded below and strictly decreases on every pass.
    Ranking(RankingFunction),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleVerdict {
    Infeasible(Infeasibility),
    Unknown(String),
}

impl CycleVerdict {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, CycleVerdict::Infeasible(_))
    }
}

impl fmt::Display for CycleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleVerdict::Infeasible(Infeasibility::Local { core }) => {
                f.write_str("infeasible (unsat core: ")?;
                for (i, t) in core.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            CycleVerdict::Infeasible(Infeasibility::Ranking(r)) => {
                write!(f, "infeasible (ranking function {r})")
            }
            CycleVerdict::Unknown(why) => write!(f, "unknown ({why})"),
        }
    }
}

/// One pass through the cycle from a free state.
struct Pass {
    query: Query,
    pre: BTreeMap<Ident, Ident>,
    post: BTreeMap<Ident, Ident>,
}

fn one_pass(u: &Universe, cycle: &[Statement]) -> Pass {
    let mut e = Encoder::new(u, Init::Free);
    for s in cycle {
        e.push(s);
    }
    Pass {
        pre: e.state_vars(0).clone(),
        post: e.state_vars(e.steps()).clone(),
        query: e.query,
    }
}

/// The query whose models are passes violating decrease or boundedness.
fn ranking_violation(pass: &Pass, f: &RankingFunction) -> Query {
    let before = f.term_over(&pass.pre);
    let after = f.term_over(&pass.post);
    let no_decrease = Term::binary(
        Op::Le,
        Term::binary(Op::Sub, before.clone(), after),
        Term::int(0),
    );
    let negative = Term::binary(Op::Lt, before, Term::int(0));
    let mut q = pass.query.clone();
    q.assert(Term::binary(Op::Or, no_decrease, negative));
    q
}

/// Re-checks a ranking function with a fresh validity query.
pub fn verify_ranking(u: &Universe, cycle: &[Statement], f: &RankingFunction, solver: &dyn Solver) -> bool {
    solver
        .check(&ranking_violation(&one_pass(u, cycle), f))
        .is_unsat()
}

/// Caps on the ranking-function search.
const MAX_COEFF: i64 = 3;
const MAX_RANK_VARS: usize = 5;
const MAX_CANDIDATES: usize = 20_000;
const MAX_VALIDITY_QUERIES: usize = 64;

type Sample = (Assignment, Assignment);

fn sample(pass: &Pass, model: &Assignment) -> Sample {
    let read = |vars: &BTreeMap<Ident, Ident>| -> Assignment {
        vars.iter()
            .map(|(x, v)| (x.clone(), model.get(v).cloned().unwrap_or_else(|_| Value::int(0))))
            .collect()
    };
    (read(&pass.pre), read(&pass.post))
}

fn dot(c: &[i64], vars: &[Ident], a: &Assignment) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, &k) in vars.iter().zip(c) {
        if k != 0 {
            if let Ok(Value::Int(v)) = a.get(x) {
                acc += v * k;
            }
        }
    }
    acc
}

/// Coefficient vectors in `[-MAX_COEFF, MAX_COEFF]^n` except zero, by
/// increasing L1 norm.
fn coefficient_vectors(n: usize) -> Vec<Vec<i64>> {
    let width = (2 * MAX_COEFF + 1) as usize;
    let total = width.checked_pow(n as u32).unwrap_or(usize::MAX).min(1 << 22);
    let mut out = Vec::new();
    for code in 1..total {
        let mut c = Vec::with_capacity(n);
        let mut r = code;
        for _ in 0..n {
            c.push((r % width) as i64 - MAX_COEFF);
            r /= width;
        }
        if c.iter().any(|&k| k != 0) {
            out.push(c);
        }
    }
    out.sort_by_key(|c| (c.iter().map(|k| k.abs()).sum::<i64>(), c.iter().map(|k| -k).collect::<Vec<_>>()));
    out.dedup();
    out
}

fn is_tmp(x: &Ident) -> bool {
    x.name.starts_with("__tmp")
}

/// Decides whether the cycle can be repeated forever. A cycle is reported
/// infeasible when one pass is unsatisfiable or when a linear ranking
/// function over the variables it writes or tests is found and verified.
pub fn cycle_infeasible(u: &Universe, cycle: &[Statement], solver: &dyn Solver) -> CycleVerdict {
    let pass = one_pass(u, cycle);
    let model = match solver.check(&pass.query) {
        SolverResult::Unsat => {
            let core = unsat_core(solver, &pass.query);
            let mut keep = vec![false; pass.query.asserts.len()];
            for &i in &core {
                keep[i] = true;
            }
            if solver.check(&pass.query.subset(&keep)).is_unsat() {
                return CycleVerdict::Infeasible(Infeasibility::Local {
                    core: core.iter().map(|&i| pass.query.asserts[i].clone()).collect(),
                });
            }
            return CycleVerdict::Unknown("unsat core did not replay".into());
        }
        SolverResult::Unknown(why) => return CycleVerdict::Unknown(why),
        SolverResult::Sat(m) => m,
    };
    // guard variables first, then written ones
    let mut vars: Vec<Ident> = Vec::new();
    let mut push = |x: Ident| {
        if u.framed.contains(&x) && !is_tmp(&x) && !vars.contains(&x) {
            vars.push(x);
        }
    };
    for s in cycle.iter().flat_map(|s| s.flatten()) {
        if let Statement::Assert(_) = s {
            s.reads().into_iter().for_each(&mut push);
        }
    }
    for s in cycle {
        s.writes().into_iter().for_each(&mut push);
    }
    vars.truncate(MAX_RANK_VARS);
    if vars.is_empty() {
        return CycleVerdict::Unknown("no variables to rank".into());
    }
    let mut samples = vec![sample(&pass, &model)];
    let mut validity = 0;
    let decreases = |c: &[i64], s: &Sample| dot(c, &vars, &s.0) - dot(c, &vars, &s.1) >= BigInt::from(1);
    for c in coefficient_vectors(vars.len()).into_iter().take(MAX_CANDIDATES) {
        if !samples.iter().all(|s| decreases(&c, s)) {
            continue;
        }
        for _ in 0..3 {
            if validity >= MAX_VALIDITY_QUERIES {
                return CycleVerdict::Unknown(format!(
                    "no ranking function within {MAX_VALIDITY_QUERIES} validity checks"
                ));
            }
            let low = samples
                .iter()
                .map(|s| dot(&c, &vars, &s.0))
                .min()
                .unwrap_or_default();
            let constant: i64 = if low.is_negative() {
                match i64::try_from(-low) {
                    Ok(k) => k,
                    Err(_) => break,
                }
            } else {
                0
            };
            let f = RankingFunction {
                coeffs: vars.iter().cloned().zip(c.iter().copied()).filter(|(_, k)| *k != 0).collect(),
                constant,
            };
            validity += 1;
            match solver.check(&ranking_violation(&pass, &f)) {
                SolverResult::Unsat => {
                    if verify_ranking(u, cycle, &f, solver) {
                        return CycleVerdict::Infeasible(Infeasibility::Ranking(f));
                    }
                    break;
                }
                SolverResult::Sat(m) => {
                    let s = sample(&pass, &m);
                    let ok = decreases(&c, &s);
                    samples.push(s);
                    if !ok {
                        break;
                    }
                }
                SolverResult::Unknown(_) => break,
            }
        }
    }
    CycleVerdict::Unknown("no linear ranking function found".into())
}

/// The automaton of words `w · ϱ^ω` over `alphabet`: a non-accepting start
/// state looping on every letter and an accepting copy of the cycle.
pub fn cycle_automaton(cycle: &[Statement], alphabet: &BTreeSet<Statement>) -> BuchiAutomaton<Statement> {
    assert!(!cycle.is_empty());
    let n = cycle.len();
    let mut a = BuchiAutomaton::new("q0", false);
    for j in 1..=n {
        a.add_state(format!("q{j}"), true);
    }
    for l in alphabet {
        a.add_transition(0, l.clone(), 0, ());
    }
    let next = |j: usize| if j == n { 1 } else { j + 1 };
    a.add_transition(0, cycle[0].clone(), next(1), ());
    for (j, s) in cycle.iter().enumerate() {
        a.add_transition(j + 1, s.clone(), next(j + 1), ());
    }
    a
}

/// One examined cycle of the removal loop.
#[derive(Debug, Clone)]
pub struct CycleReport {
    pub iteration: usize,
    pub states: Vec<String>,
    pub labels: Vec<Statement>,
    pub verdict: CycleVerdict,
}

/// Outcome of [`remove_infeasible_cycles`].
#[derive(Debug, Clone)]
pub struct CycleRemoval<T> {
    pub automaton: ProgramAutomaton<T>,
    pub reports: Vec<CycleReport>,
    /// The cycle enumeration hit its cap in some iteration.
    pub truncated: bool,
}

/// Repeats `iterations` times: enumerate the simple cycles through an
/// accepting state, prove as many infeasible as possible, and subtract the
/// words that end in them.
pub fn remove_infeasible_cycles<T: Clone>(
    p: &ProgramAutomaton<T>,
    iterations: usize,
    solver: &dyn Solver,
    cycle_limit: usize,
    budget: usize,
) -> Result<CycleRemoval<T>, BuchiError> {
    let mut current = p.with_automaton(p.automaton.trim());
    let mut reports = Vec::new();
    let mut truncated = false;
    let mut memo: HashMap<Vec<Statement>, CycleVerdict> = HashMap::new();
    for iteration in 0..iterations {
        let a = &current.automaton;
        let (cycles, cut) = a.simple_cycles(cycle_limit);
        truncated |= cut;
        let mut infeasible: Vec<Vec<Statement>> = Vec::new();
        for cyc in cycles {
            if !cyc.iter().any(|&i| a.is_accepting(a.transition(i).from)) {
                continue;
            }
            let labels: Vec<Statement> = cyc.iter().map(|&i| a.transition(i).label.clone()).collect();
            if infeasible.contains(&labels) {
                continue;
            }
            let verdict = memo
                .entry(labels.clone())
                .or_insert_with(|| cycle_infeasible(&current.universe, &labels, solver))
                .clone();
            reports.push(CycleReport {
                iteration,
                states: cyc.iter().map(|&i| a.name(a.transition(i).from).to_string()).collect(),
                labels: labels.clone(),
                verdict: verdict.clone(),
            });
            if verdict.is_infeasible() {
                infeasible.push(labels);
            }
        }
        if infeasible.is_empty() {
            break;
        }
        let mut next = current.automaton.clone();
        for labels in &infeasible {
            let alphabet: BTreeSet<Statement> = next.labels();
            let ar = cycle_automaton(labels, &alphabet);
            next = difference(&next, &ar, budget)?.trim();
        }
        current = current.with_automaton(next);
    }
    Ok(CycleRemoval {
        automaton: current,
        reports,
        truncated,
    })
}
