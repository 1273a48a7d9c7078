//! The checks behind the acceptance criteria. Each returns a one-line
//! summary on success and a description of the first discrepancy otherwise.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use hytsl::buchi::{complement, difference, DEFAULT_COMPLEMENT_BUDGET};
use hytsl::checker::{check, CheckOptions, Outcome, TraceWitness, Verdict};
use hytsl::feasibility::{
    cycle_infeasible, k_window_feasible, remove_k_infeasibility, verify_ranking, BuiltinSolver, CycleVerdict,
    Infeasibility, RankingFunction,
};
use hytsl::logic::{eval_tsl, ltl_skeleton, parse_formula, seq_of, Temporal, TemporalFormula, TslAtom};
use hytsl::ltl::Valuation;
use hytsl::program::{combine, parse_program_automaton, parse_statement, ProgramAutomaton, Statement, Universe};
use hytsl::terms::{holds, update_holds, Assignment, Computation, Ident, Op, PredicateTerm, Term, UpdateTerm, Value};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::*;

pub type Summary = Result<String, String>;

fn st(text: &str) -> Statement {
    parse_statement(text, &BTreeSet::new()).unwrap()
}

fn cells(names: &[&str]) -> Universe {
    let ids: Vec<Ident> = names.iter().map(|n| Ident::cell(*n)).collect();
    Universe {
        framed: ids.iter().cloned().collect(),
        inputs: BTreeSet::new(),
        initial: Assignment::zeros(&ids),
    }
}

// ---------------------------------------------------------------- goldens

pub struct Golden {
    pub verdict: Verdict,
    pub system: ProgramAutomaton,
    pub elapsed: Duration,
}

pub fn run_golden(system: &str, formula: &str, cycle_iters: usize) -> Golden {
    let p = parse_program_automaton(&data(system)).unwrap();
    let f = parse_formula(&data(formula)).unwrap();
    let opts = CheckOptions {
        k: 1,
        cycle_iters,
        ..CheckOptions::default()
    };
    let t = Instant::now();
    let verdict = check(&p, &f, &opts, &BuiltinSolver::default()).unwrap();
    Golden {
        verdict,
        system: p,
        elapsed: t.elapsed(),
    }
}

fn flat(stmts: &[Statement]) -> Vec<String> {
    stmts.iter().flat_map(|s| s.flatten()).map(|s| s.to_string()).collect()
}

pub fn gni() -> Summary {
    let g = run_golden("gni.pa", "gni.htsl", 0);
    let v = &g.verdict;
    if v.outcome != Outcome::Violated {
        return Err(format!("outcome {}", v.outcome));
    }
    let t = &v.traces[0];
    let (stem, cycle) = (flat(&t.stem), flat(&t.cycle));
    if stem.first().map(String::as_str) != Some("assert(i < 0)") {
        return Err(format!("stem {stem:?}"));
    }
    if !cycle.iter().any(|s| s == "c := 0") {
        return Err(format!("loop {cycle:?}"));
    }
    if g.elapsed >= Duration::from_secs(5) {
        return Err(format!("took {:?}", g.elapsed));
    }
    Ok(format!("violated, stem {stem:?}, loop {cycle:?}, {:?}", g.elapsed))
}

pub fn cycle_example() -> Summary {
    let g = run_golden("cycle.pa", "cycle.htsl", 1);
    let v = &g.verdict;
    if v.outcome != Outcome::Violated {
        return Err(format!("k'=1: outcome {}", v.outcome));
    }
    let t = &v.traces[0];
    let (stem, cycle) = (flat(&t.stem), flat(&t.cycle));
    if stem != ["n := *", "p := *", "assert(p = 0)"] || cycle != ["n := n - 1"] {
        return Err(format!("k'=1: lasso {stem:?} {cycle:?}"));
    }
    let g0 = run_golden("cycle.pa", "cycle.htsl", 0);
    if g0.verdict.outcome != Outcome::NoViolationFound {
        return Err(format!("k'=0: outcome {}", g0.verdict.outcome));
    }
    let total = g.elapsed + g0.elapsed;
    if total >= Duration::from_secs(10) {
        return Err(format!("took {total:?}"));
    }
    Ok(format!("k'=1 violated with {stem:?}·{cycle:?}^ω, k'=0 no-violation-found, {total:?}"))
}

// ----------------------------------------------------------------- windows

pub fn example_windows() -> Summary {
    let s = BuiltinSolver::default();
    let u = cells(&["n"]);
    let dec = st("n--; assert(n >= 0)");
    let one = st("n := 1; assert(n >= 0)");
    // t1 = dec one dec^ω, unrolled far enough to contain every window
    let t1: Vec<Statement> = [dec.clone(), one.clone()].into_iter().chain(vec![dec.clone(); 6]).collect();
    let feasible = |w: &[Statement]| k_window_feasible(&u, w, &s);
    let brute = |w: &[Statement]| {
        let f: Vec<Statement> = w.iter().flat_map(|x| x.flatten()).collect();
        window_feasible_brute(&u, &f)
    };
    let three = &t1[1..4];
    if feasible(three) || brute(three) {
        return Err("the 3-window of t1 is feasible".into());
    }
    for w in t1.windows(2) {
        if !feasible(w) || !brute(w) {
            return Err(format!("2-window {w:?} of t1 is infeasible"));
        }
    }
    let t2: Vec<Statement> = std::iter::once(st("n := *")).chain(vec![dec; 7]).collect();
    let mut count = 0;
    for k in 1..=6 {
        for w in t2.windows(k) {
            count += 1;
            if !feasible(w) {
                return Err(format!("{k}-window of t2 reported infeasible"));
            }
        }
    }
    Ok(format!("t1 3-window infeasible, its 2-windows feasible; {count} windows of t2 feasible"))
}

// ----------------------------------------------------------------- ranking

/// Checks `f` on every pass of the cycle from a [`RANGE`] pre-state: the
/// pass starts where `f >= 0` and ends where `f` is strictly smaller.
fn ranking_oracle(u: &Universe, cycle: &[Statement], f: &RankingFunction) -> Result<usize, String> {
    let stmts: Vec<Statement> = cycle.iter().flat_map(|s| s.flatten()).collect();
    let mut passes = 0;
    for pre in all_states(u) {
        for post in posts(u, &pre, &stmts, false) {
            passes += 1;
            let (a, b) = (f.eval(&pre).unwrap(), f.eval(&post).unwrap());
            if a < 0.into() || b >= a {
                return Err(format!("{f} fails on {pre:?} -> {post:?}"));
            }
        }
    }
    Ok(passes)
}

pub fn ranking() -> Summary {
    let s = BuiltinSolver::default();
    let u2 = cells(&["n"]).on_trace("pi").union(&cells(&["n"]).on_trace("pi2"));
    let cyc2 = [Statement::sequence(vec![
        st("n--").on_trace("pi"),
        st("n := n - 2").on_trace("pi2"),
        st("assert(n[pi] < n[pi2])"),
    ])];
    let u1 = cells(&["n"]);
    let cyc1 = [st("n--"), st("assert(n >= 0)")];
    let mut out = Vec::new();
    for (u, cyc) in [(&u2, &cyc2[..]), (&u1, &cyc1[..])] {
        let f = match cycle_infeasible(u, cyc, &s) {
            CycleVerdict::Infeasible(Infeasibility::Ranking(f)) => f,
            v => return Err(format!("{cyc:?}: {v}")),
        };
        if !verify_ranking(u, cyc, &f, &s) {
            return Err(format!("{f} not verified"));
        }
        ranking_oracle(u, cyc, &f)?;
        out.push(f);
    }
    let n = &out[1];
    if n.coeffs.len() != 1 || n.coeffs.get(&Ident::cell("n")).copied().unwrap_or(0) <= 0 {
        return Err(format!("countdown ranked by {n}"));
    }
    Ok(format!("ranking functions {} and {}", out[0], out[1]))
}

// ------------------------------------------------------------ k-feasibility

pub fn k_feasibility(programs: usize) -> Summary {
    let s = BuiltinSolver::default();
    let mut r = rng(5);
    let alphabet: Vec<Statement> = COUNTER_LABELS.iter().map(|l| st(l)).collect();
    let all = lassos(&alphabet, 3, 3);
    let u = cells(&["n"]);
    let mut window_memo: HashMap<Vec<Statement>, bool> = HashMap::new();
    let mut checked = 0usize;
    let mut members = 0usize;
    for i in 0..programs {
        let p = random_counter_program(&mut r);
        let mp = Membership::new(&p.automaton);
        for k in 1..=3 {
            let pk = remove_k_infeasibility(&p, k, &s, 100_000).unwrap();
            for (stem, cycle) in &all {
                let got = pk.automaton.accepts_lasso(stem, cycle);
                let in_p = mp.accepts(stem, cycle);
                let word: Vec<&Statement> = stem.iter().chain(cycle.iter().cycle().take(cycle.len() + k)).collect();
                let windows_ok = in_p
                    && (0..stem.len() + cycle.len()).all(|j| {
                        let w: Vec<Statement> = word[j..j + k].iter().map(|s| (*s).clone()).collect();
                        *window_memo
                            .entry(w.clone())
                            .or_insert_with(|| window_feasible_brute(&u, &w))
                    });
                checked += 1;
                members += got as usize;
                if got != windows_ok {
                    return Err(format!(
                        "program {i}, k={k}, lasso {stem:?} ({cycle:?})^ω: P_k says {got}, oracle says {windows_ok}"
                    ));
                }
            }
        }
    }
    Ok(format!("{programs} programs, k in 1..=3, {checked} lassos, {members} accepted, no discrepancies"))
}

// --------------------------------------------------------------- automata

pub fn buchi_algebra(pairs: usize) -> Summary {
    let mut r = rng(6);
    let alphabet = ['a', 'b'];
    let all = lassos(&alphabet, 3, 3);
    let mut checked = 0usize;
    for i in 0..pairs {
        let a = random_automaton(&mut r, 3, &alphabet, 0.35, false);
        let b = random_automaton(&mut r, 3, &alphabet, 0.35, false);
        let inter = a.intersect(&b);
        let ca = complement(&a, &alphabet, DEFAULT_COMPLEMENT_BUDGET).map_err(|e| e.to_string())?;
        let diff = difference(&a, &b, DEFAULT_COMPLEMENT_BUDGET).map_err(|e| e.to_string())?;
        let union = a.union(&b);
        let (ma, mb) = (Membership::new(&a), Membership::new(&b));
        let ops = [
            ("intersection", Membership::new(&inter)),
            ("complement", Membership::new(&ca)),
            ("difference", Membership::new(&diff)),
            ("union", Membership::new(&union)),
        ];
        for (stem, cycle) in &all {
            let (x, y) = (ma.accepts(stem, cycle), mb.accepts(stem, cycle));
            let wants = [x && y, !x, x && !y, x || y];
            for ((name, m), want) in ops.iter().zip(wants) {
                checked += 1;
                if m.accepts(stem, cycle) != want {
                    return Err(format!("pair {i}: {name} wrong on {stem:?} ({cycle:?})^ω"));
                }
            }
        }
        if !a.intersect(&ca).is_empty() {
            return Err(format!("pair {i}: A ∩ ¬A is not empty"));
        }
    }
    Ok(format!("{pairs} pairs, {checked} memberships, A ∩ ¬A empty in every case"))
}

// ---------------------------------------------------------------- formulas

fn random_atom(r: &mut ChaCha8Rng) -> TslAtom {
    let x = || Term::var(Ident::cell("x"));
    let y = || Term::var(Ident::cell("y"));
    let c = |n: i64| Term::int(n);
    let pred = |t: Term| TslAtom::Pred(PredicateTerm::new(t).unwrap());
    let upd = |target: &str, t: Term| TslAtom::Upd(UpdateTerm::new(Ident::cell(target), t).unwrap());
    match r.gen_range(0..8) {
        0 => pred(Term::binary(Op::Lt, x(), y())),
        1 => pred(Term::binary(Op::Eq, x(), c(0))),
        2 => pred(Term::binary(Op::Ge, y(), Term::binary(Op::Add, x(), c(1)))),
        3 => pred(Term::binary(Op::Ne, y(), c(r.gen_range(-2..=2)))),
        4 => upd("x", Term::binary(Op::Add, x(), c(1))),
        5 => upd("y", x()),
        6 => upd("x", Term::binary(Op::Sub, y(), c(1))),
        _ => upd("y", y()),
    }
}

fn random_formula(r: &mut ChaCha8Rng, size: usize) -> TemporalFormula {
    if size <= 1 {
        return if r.gen_bool(0.1) {
            Temporal::Const(r.gen_bool(0.5))
        } else {
            Temporal::Atom(random_atom(r))
        };
    }
    let ops = if size >= 3 { 4 } else { 2 };
    match r.gen_range(0..ops) {
        0 => Temporal::Not(Box::new(random_formula(r, size - 1))),
        1 => Temporal::Next(Box::new(random_formula(r, size - 1))),
        op => {
            let left = r.gen_range(1..size - 1);
            let right = size - 1 - left;
            let (a, b) = (random_formula(r, left), random_formula(r, right));
            if op == 2 {
                Temporal::And(Box::new(a), Box::new(b))
            } else {
                Temporal::Until(Box::new(a), Box::new(b))
            }
        }
    }
}

fn random_computation(r: &mut ChaCha8Rng) -> Computation {
    let state = |r: &mut ChaCha8Rng| {
        Assignment::new()
            .with(Ident::cell("x"), Value::int(r.gen_range(-2..=2)))
            .with(Ident::cell("y"), Value::int(r.gen_range(-2..=2)))
    };
    let initial = state(r);
    let stem = (0..r.gen_range(0..=3)).map(|_| state(r)).collect();
    let cycle = (0..r.gen_range(1..=3)).map(|_| state(r)).collect();
    Computation::new(initial, stem, cycle)
}

pub fn lemma_one(instances: usize) -> Summary {
    let mut r = rng(7);
    let mut positions = 0usize;
    for i in 0..instances {
        let size = r.gen_range(1..=6);
        let f = random_formula(&mut r, size);
        let z = random_computation(&mut r);
        let (ltl, atoms) = ltl_skeleton(&f);
        let (stem, cycle) = seq_of(&z, &atoms).map_err(|e| e.to_string())?;
        let horizon = z.stem.len() + 2 * z.cycle.len();
        for t in 0..=horizon {
            // the letter at t holds exactly the atoms true at t
            let letter = if t < stem.len() {
                stem[t]
            } else {
                cycle[(t - stem.len()) % cycle.len()]
            };
            for (j, a) in atoms.iter().enumerate() {
                let direct = match &a {
                    TslAtom::Pred(p) => holds(p, z.at(t as i64)),
                    TslAtom::Upd(u) => update_holds(u, z.at(t as i64 - 1), z.at(t as i64)),
                }
                .map_err(|e| e.to_string())?;
                if letter.get(j) != direct {
                    return Err(format!("instance {i}: letter {t} disagrees on atom {j}"));
                }
            }
            let tsl = eval_tsl(&f, &z, t).map_err(|e| e.to_string())?;
            let ltl_value = ltl_holds(&ltl, &stem, &cycle, t);
            positions += 1;
            if tsl != ltl_value {
                return Err(format!("instance {i}: `{f}` at {t}: eval_tsl {tsl}, LTL {ltl_value}"));
            }
        }
    }
    Ok(format!("{instances} instances, {positions} positions agree"))
}

// ----------------------------------------------------------------- combine

pub fn combine_shape() -> Summary {
    let f = parse_formula("G (n > 0 && [n <- n + 7])").unwrap();
    let atoms = f.atoms();
    let inputs = BTreeSet::from([Ident::input("i")]);
    let s = parse_statement("n := 42", &inputs).unwrap();
    let l = Valuation::default().with(0, true).with(1, true);
    let got: Vec<String> = combine(&s, l, &atoms, &inputs).flatten().iter().map(|s| s.to_string()).collect();
    let want = ["__tmp0 := n + 7", "n := 42", "i := *", "assert(n > 0)", "assert(n = __tmp0)"];
    if got != want {
        return Err(format!("{got:?}"));
    }
    Ok(got.join("; "))
}

// ---------------------------------------------------------------- checker

pub struct Case {
    pub name: &'static str,
    pub system: &'static str,
    pub formula: &'static str,
    pub expect: Outcome,
}

pub const COUNTER: &str = "cells: n\nstate q0 initial accepting\nstate q1 accepting\n\
                           trans q0 -> q1 : n := 0\ntrans q1 -> q1 : n--\n";
pub const CONSTANT: &str = "cells: c\nstate q0 initial accepting\ntrans q0 -> q0 : c := 0\n";
pub const TOGGLE: &str = "cells: c\ninputs: i\nstate q0 initial accepting\nstate q1 accepting\n\
                          trans q0 -> q1 : assert(i > 0)\ntrans q0 -> q0 : assert(i <= 0)\n\
                          trans q1 -> q1 : c := 1\n";

pub fn cases() -> Vec<Case> {
    let gni = include_str!("../../data/gni.pa");
    vec![
        Case { name: "constant never one", system: CONSTANT, formula: "G !(c = 1)", expect: Outcome::Satisfied },
        Case { name: "countdown stays nonpositive", system: COUNTER, formula: "X G (n <= 0)", expect: Outcome::Satisfied },
        Case { name: "false", system: CONSTANT, formula: "false", expect: Outcome::Violated },
        Case { name: "countdown reaches minus two", system: COUNTER, formula: "G (n > -2)", expect: Outcome::Violated },
        Case { name: "update each step", system: COUNTER, formula: "X X G [n <- n - 1]", expect: Outcome::Satisfied },
        Case { name: "toggle eventually", system: TOGGLE, formula: "F (c = 1)", expect: Outcome::Violated },
        Case {
            name: "gni outputs are binary",
            system: gni,
            formula: "forall pi. G (c[pi] = 0 || c[pi] = 1)",
            expect: Outcome::Satisfied,
        },
        Case {
            name: "gni outputs agree",
            system: gni,
            formula: "forall pi. forall pi2. G (c[pi] = c[pi2])",
            expect: Outcome::Violated,
        },
        Case { name: "gni output one", system: gni, formula: "exists pi. F (c[pi] = 1)", expect: Outcome::WitnessFound },
        Case { name: "nothing exists", system: gni, formula: "exists pi. G false", expect: Outcome::NoWitnessFound },
        Case {
            name: "two traces differ",
            system: gni,
            formula: "exists pi. exists pi2. F (c[pi] != c[pi2])",
            expect: Outcome::WitnessFound,
        },
    ]
}

pub fn run_case(c: &Case) -> (ProgramAutomaton, Verdict) {
    let p = parse_program_automaton(c.system).unwrap();
    let f = parse_formula(c.formula).unwrap();
    let v = check(&p, &f, &CheckOptions::default(), &BuiltinSolver::default()).unwrap();
    (p, v)
}

// ---------------------------------------------------------------- soundness

/// Replays a trace witness label by label against the original system.
pub fn replay_witness(p: &ProgramAutomaton, t: &TraceWitness) -> Result<(), String> {
    let u = &p.universe;
    let mut labels: Vec<&Statement> = t.stem.iter().collect();
    for _ in 0..t.iterations {
        labels.extend(&t.cycle);
    }
    let states: Vec<&Assignment> = t.stem_states.iter().chain(&t.cycle_states).collect();
    if labels.len() != states.len() {
        return Err(format!("{} states for {} labels", states.len(), labels.len()));
    }
    let mut steps: Vec<(&Assignment, &Statement, &Assignment)> = Vec::new();
    let mut prev = &t.initial;
    for (s, cur) in labels.iter().zip(&states) {
        steps.push((prev, s, cur));
        prev = cur;
    }
    if t.periodic {
        // the loop closes: its first label leads back to its first state
        let first = t.stem_states.len();
        steps.push((prev, &t.cycle[0], states[first]));
    }
    for (j, (prev, s, cur)) in steps.into_iter().enumerate() {
        let ok = if s.is_basic() {
            replay(u, prev, &[(*cur).clone()], &[s.clone()]).map_err(|e| format!("label {j}: {e}"))?;
            true
        } else {
            posts(u, prev, &s.flatten(), false).contains(cur)
        };
        if !ok {
            return Err(format!("label {j} `{s}` does not lead to the recorded state"));
        }
    }
    Ok(())
}

/// A violated or witness verdict is sound when every trace replays, the
/// library's own revalidation agrees and, for periodic computations, the
/// formula evaluates as claimed.
pub fn audit(p: &ProgramAutomaton, v: &Verdict) -> Result<(), String> {
    if !matches!(v.outcome, Outcome::Violated | Outcome::WitnessFound) {
        return Ok(());
    }
    if v.traces.is_empty() {
        return Err("no traces reported".into());
    }
    for t in &v.traces {
        if !t.revalidated {
            return Err(format!("trace {} not revalidated", t.trace));
        }
        replay_witness(p, t).map_err(|e| format!("trace {}: {e}", t.trace))?;
    }
    if v.semantic_check == Some(false) {
        return Err("semantic check failed".into());
    }
    Ok(())
}

pub fn soundness() -> Summary {
    let mut audited = 0;
    let mut notes = Vec::new();
    for c in cases() {
        let (p, v) = run_case(&c);
        audit(&p, &v).map_err(|e| format!("{}: {e}", c.name))?;
        audited += matches!(v.outcome, Outcome::Violated | Outcome::WitnessFound) as usize;
    }
    for (sys, f, iters) in [("gni.pa", "gni.htsl", 0), ("cycle.pa", "cycle.htsl", 1)] {
        let g = run_golden(sys, f, iters);
        audit(&g.system, &g.verdict).map_err(|e| format!("{sys}: {e}"))?;
        let partner = g.verdict.partner.as_ref().ok_or(format!("{sys}: no partner check"))?;
        if partner.bound < 4 || !partner.confirmed() {
            return Err(format!("{sys}: partner check {partner:?}"));
        }
        audited += 1;
        notes.push(format!("{sys} {}/{} refuted", partner.refuted, partner.candidates));
    }
    Ok(format!("{audited} verdicts replayed; partner search: {}", notes.join(", ")))
}
