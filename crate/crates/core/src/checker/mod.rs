//! Decision procedures: TSL(T) model checking, alternation-free HyperTSL(T)
//! via self-composition, and refutation of ∀*∃* formulas.

mod partner;
mod report;

use std::collections::BTreeSet;
use std::fmt;

use crate::buchi::{difference, BuchiError, DEFAULT_COMPLEMENT_BUDGET};
use crate::feasibility::{
    check_lasso, find_feasible_lasso, prune_by_intervals, remove_infeasible_cycles,
    remove_k_infeasibility, Attempt, CountingSolver, CycleReport, FeasibleLasso, LassoBounds,
    LassoSearch, Solver, SolverStats,
};
use crate::logic::{eval_tsl, hyper_computation, ltl_skeleton, Formula, Quantifier, TemporalFormula, TslAtom};
use crate::ltl::translate;
use crate::program::{
    combined_product, self_compose, universal_projection, ProgramAutomaton, Provenance, Statement,
};
use crate::terms::{Assignment, Computation, Ident, PredicateTerm, UpdateTerm, VarKind};

pub use partner::{enumerate_lassos, PartnerCheck};

/// Pipeline stages that can be dumped as DOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Raw,
    SelfComposed,
    Product,
    KPruned,
    CyclePruned,
    Projected,
    Difference,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Raw,
        Stage::SelfComposed,
        Stage::Product,
        Stage::KPruned,
        Stage::CyclePruned,
        Stage::Projected,
        Stage::Difference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::SelfComposed => "self-composed",
            Stage::Product => "product",
            Stage::KPruned => "k-pruned",
            Stage::CyclePruned => "cycle-pruned",
            Stage::Projected => "projected",
            Stage::Difference => "difference",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Window length for k-infeasibility; 0 disables the pruning.
    pub k: usize,
    /// Rounds of infeasible-cycle removal.
    pub cycle_iters: usize,
    pub stem_bound: usize,
    pub cycle_limit: usize,
    pub max_lassos: usize,
    pub complement_budget: usize,
    /// Stem and loop bound of the ∃-partner diagnostic.
    pub partner_bound: usize,
    /// Interval pruning before the k-windows (not used for ∀∃ refutation).
    pub interval_pruning: bool,
    pub dump: BTreeSet<Stage>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            k: 1,
            cycle_iters: 1,
            stem_bound: 8,
            cycle_limit: 2_000,
            max_lassos: 2_000,
            complement_budget: DEFAULT_COMPLEMENT_BUDGET,
            partner_bound: 4,
            interval_pruning: true,
            dump: BTreeSet::new(),
        }
    }
}

impl CheckOptions {
    fn lasso_bounds(&self) -> LassoBounds {
        LassoBounds {
            stem_bound: self.stem_bound,
            cycle_limit: self.cycle_limit,
            max_lassos: self.max_lassos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Satisfied,
    Violated,
    WitnessFound,
    NoViolationFound,
    NoWitnessFound,
    ResourceExceeded,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Satisfied => "satisfied",
            Outcome::Violated => "violated",
            Outcome::WitnessFound => "witness-found",
            Outcome::NoViolationFound => "no-violation-found",
            Outcome::NoWitnessFound => "no-witness-found",
            Outcome::ResourceExceeded => "resource-exceeded",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Satisfied | Outcome::NoViolationFound | Outcome::NoWitnessFound => 0,
            Outcome::Violated => 1,
            Outcome::WitnessFound => 2,
            Outcome::ResourceExceeded => 3,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Procedure {
    Tsl,
    Universal,
    Existential,
    ForallExists,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Tsl => "tsl",
            Procedure::Universal => "universal",
            Procedure::Existential => "existential",
            Procedure::ForallExists => "forall-exists",
        }
    }
}

/// The lasso found in the final automaton of a pipeline.
#[derive(Debug, Clone)]
pub struct CombinedLasso {
    pub stem_states: Vec<String>,
    pub stem: Vec<Statement>,
    pub cycle_states: Vec<String>,
    pub cycle: Vec<Statement>,
}

/// One trace of a counterexample or witness, with its computation at label
/// granularity. `cycle_states` covers `iterations` passes of the loop.
#[derive(Debug, Clone)]
pub struct TraceWitness {
    pub trace: String,
    pub stem: Vec<Statement>,
    pub cycle: Vec<Statement>,
    pub initial: Assignment,
    pub stem_states: Vec<Assignment>,
    pub cycle_states: Vec<Assignment>,
    pub iterations: usize,
    pub periodic: bool,
    /// Not periodic, and the loop keeps a condition that lets it run again.
    pub recurrent: bool,
    /// The lasso was found feasible again by an independent query in the
    /// original system.
    pub revalidated: bool,
}

impl TraceWitness {
    pub fn computation(&self) -> Option<Computation> {
        self.periodic.then(|| {
            Computation::new(self.initial.clone(), self.stem_states.clone(), self.cycle_states.clone())
        })
    }

    /// The flattened statements of the stem followed by one loop pass.
    pub fn flattened(&self) -> (Vec<Statement>, Vec<Statement>) {
        let flat = |v: &[Statement]| v.iter().flat_map(|s| s.flatten()).collect();
        (flat(&self.stem), flat(&self.cycle))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSize {
    pub stage: Stage,
    pub states: usize,
    pub transitions: usize,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub procedure: Procedure,
    pub formula: String,
    pub detail: String,
    pub lasso: Option<CombinedLasso>,
    pub traces: Vec<TraceWitness>,
    /// Re-evaluation of the formula on periodic witness computations.
    pub semantic_check: Option<bool>,
    pub cycles: Vec<CycleReport>,
    pub partner: Option<PartnerCheck>,
    pub sizes: Vec<StageSize>,
    pub solver: SolverStats,
    pub solver_name: String,
    pub options: CheckOptions,
    pub dumps: Vec<(Stage, String)>,
}

impl Verdict {
    /// Every reported trace was revalidated and no semantic check failed.
    pub fn is_validated(&self) -> bool {
        self.traces.iter().all(|t| t.revalidated) && self.semantic_check != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("unsupported quantifier prefix `{0}`: expected a block of foralls followed by a block of exists")]
    Prefix(String),
    #[error("formula refers to undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("identifier `{0}` needs a trace index")]
    MissingTrace(String),
    #[error("identifier `{0}` has a trace index in a formula without quantifiers")]
    UnexpectedTrace(String),
    #[error("update term assigns to input `{0}`")]
    InputUpdate(String),
    #[error("formula has {0} atoms; at most {MAX_ATOMS} are supported")]
    TooManyAtoms(usize),
}

pub const MAX_ATOMS: usize = 16;

/// Checks the identifiers of `core` against the system and marks inputs.
fn prepare(p: &ProgramAutomaton, f: &Formula) -> Result<TemporalFormula, CheckError> {
    let quantified = !f.prefix.is_empty();
    let mut idents: Vec<Ident> = Vec::new();
    let mut update_targets: Vec<Ident> = Vec::new();
    f.core.for_each_atom(&mut |a| match a {
        TslAtom::Pred(pt) => idents.extend(pt.term().vars()),
        TslAtom::Upd(u) => {
            idents.push(u.target.clone());
            idents.extend(u.source.vars());
            update_targets.push(u.target.clone());
        }
    });
    let is_input = |x: &Ident| p.universe.inputs.contains(&Ident::input(x.name.clone()));
    for x in &idents {
        if !is_input(x) && !p.universe.framed.contains(&Ident::cell(x.name.clone())) {
            return Err(CheckError::Undeclared(x.name.clone()));
        }
        match (&x.trace, quantified) {
            (Some(_), false) => return Err(CheckError::UnexpectedTrace(x.to_string())),
            (None, true) => return Err(CheckError::MissingTrace(x.to_string())),
            _ => {}
        }
    }
    if let Some(x) = update_targets.iter().find(|x| is_input(x)) {
        return Err(CheckError::InputUpdate(x.to_string()));
    }
    let fix = |x: &Ident| -> Ident {
        Ident {
            kind: if is_input(x) { VarKind::Input } else { VarKind::Cell },
            ..x.clone()
        }
    };
    let core = f.core.map_atoms(&mut |a| match a {
        TslAtom::Pred(pt) => TslAtom::Pred(PredicateTerm(pt.term().map_vars(&fix))),
        TslAtom::Upd(u) => TslAtom::Upd(UpdateTerm {
            target: fix(&u.target),
            source: u.source.map_vars(&fix),
        }),
    });
    let n = crate::logic::atoms(&core).len();
    if n > MAX_ATOMS {
        return Err(CheckError::TooManyAtoms(n));
    }
    Ok(core)
}

/// Mutable state shared by the stages of one check.
struct Run<'a> {
    opts: &'a CheckOptions,
    solver: CountingSolver<'a>,
    sizes: Vec<StageSize>,
    dumps: Vec<(Stage, String)>,
    cycles: Vec<CycleReport>,
}

impl<'a> Run<'a> {
    fn new(opts: &'a CheckOptions, solver: &'a dyn Solver) -> Self {
        Run {
            opts,
            solver: CountingSolver::new(solver),
            sizes: Vec::new(),
            dumps: Vec::new(),
            cycles: Vec::new(),
        }
    }

    fn record<T: Clone>(&mut self, stage: Stage, p: &ProgramAutomaton<T>) {
        self.sizes.push(StageSize {
            stage,
            states: p.automaton.num_states(),
            transitions: p.automaton.transitions().len(),
        });
        if self.opts.dump.contains(&stage) {
            self.dumps.push((stage, p.automaton.to_dot(stage.name())));
        }
    }

    /// Interval pruning (optional), k-windows and cycle removal.
    fn prune(
        &mut self,
        prod: ProgramAutomaton<Provenance>,
        intervals: bool,
    ) -> Result<ProgramAutomaton<Provenance>, BuchiError> {
        let mut a = prod;
        if intervals {
            a = prune_by_intervals(&a);
        }
        a = remove_k_infeasibility(&a, self.opts.k, &self.solver, self.opts.complement_budget)?;
        self.record(Stage::KPruned, &a);
        let removal = remove_infeasible_cycles(
            &a,
            self.opts.cycle_iters,
            &self.solver,
            self.opts.cycle_limit,
            self.opts.complement_budget,
        )?;
        self.cycles.extend(removal.reports);
        self.record(Stage::CyclePruned, &removal.automaton);
        Ok(removal.automaton)
    }

    fn verdict(self, procedure: Procedure, f: &Formula, outcome: Outcome, detail: String) -> Verdict {
        Verdict {
            outcome,
            procedure,
            formula: f.to_string(),
            detail,
            lasso: None,
            traces: Vec::new(),
            semantic_check: None,
            cycles: self.cycles,
            partner: None,
            sizes: self.sizes,
            solver: self.solver.stats(),
            solver_name: self.solver.name(),
            options: self.opts.clone(),
            dumps: self.dumps,
        }
    }
}

fn strip_trace(x: &Ident) -> Ident {
    Ident {
        trace: None,
        ..x.clone()
    }
}

/// Splits a lasso of a composed automaton into per-trace lassos and
/// re-checks each of them in `p`.
fn decompose(
    p: &ProgramAutomaton,
    lasso: &FeasibleLasso<Provenance>,
    traces: &[String],
    solver: &dyn Solver,
) -> Vec<TraceWitness> {
    let w = &lasso.witness;
    let (stem_states, cycle_states) = w.label_states();
    let count = traces.len().max(1);
    (0..count)
        .map(|j| {
            let trace = traces.get(j).cloned();
            let part = |path: &[(Statement, Provenance)]| -> Vec<Statement> {
                path.iter().map(|(_, tag)| tag.parts[j].map_idents(&strip_trace)).collect()
            };
            let project = |a: &Assignment| -> Assignment {
                a.restrict(|x| x.trace == trace && p.universe.contains(&strip_trace(x)))
                    .map_idents(strip_trace)
            };
            let stem = part(&lasso.stem);
            let cycle = part(&lasso.cycle);
            let revalidated = matches!(check_lasso(&p.universe, &stem, &cycle, solver), Attempt::Found(_));
            TraceWitness {
                trace: trace.clone().unwrap_or_default(),
                stem,
                cycle,
                initial: project(&w.initial),
                stem_states: stem_states.iter().map(project).collect(),
                cycle_states: cycle_states.iter().map(project).collect(),
                iterations: w.iterations,
                periodic: w.periodic,
                recurrent: w.recurrence.is_some(),
                revalidated,
            }
        })
        .collect()
}

/// Evaluates `core` on the periodic per-trace computations.
fn semantic_value(core: &TemporalFormula, traces: &[TraceWitness], hyper: bool) -> Option<bool> {
    let comps: Option<Vec<Computation>> = traces.iter().map(|t| t.computation()).collect();
    let comps = comps?;
    let z = if hyper {
        let parts: Vec<(&str, &Computation)> =
            traces.iter().zip(&comps).map(|(t, c)| (t.trace.as_str(), c)).collect();
        hyper_computation(&parts)
    } else {
        comps[0].clone()
    };
    eval_tsl(core, &z, 0).ok()
}

fn combined(l: &FeasibleLasso<Provenance>) -> CombinedLasso {
    CombinedLasso {
        stem_states: l.stem_states.clone(),
        stem: l.stem.iter().map(|(s, _)| s.clone()).collect(),
        cycle_states: l.cycle_states.clone(),
        cycle: l.cycle.iter().map(|(s, _)| s.clone()).collect(),
    }
}

/// Shared pipeline of the alternation-free procedures: search
/// `Pⁿ ⊗ A_core` for a feasible lasso.
fn alternation_free(
    p: &ProgramAutomaton,
    f: &Formula,
    core: &TemporalFormula,
    searched: TemporalFormula,
    procedure: Procedure,
    opts: &CheckOptions,
    solver: &dyn Solver,
) -> Verdict {
    let mut run = Run::new(opts, solver);
    run.record(Stage::Raw, &p.with_provenance());
    let traces = f.traces();
    let base = if traces.is_empty() {
        p.with_provenance()
    } else {
        let pn = self_compose(p, &traces);
        run.record(Stage::SelfComposed, &pn);
        pn
    };
    let (ltl, atoms) = ltl_skeleton(&searched);
    let aut = translate(&ltl, atoms.len());
    let prod = combined_product(&base, &aut, &atoms);
    run.record(Stage::Product, &prod);
    let existential = procedure == Procedure::Existential;
    let (found, none, none_bounded) = if existential {
        (Outcome::WitnessFound, Outcome::NoWitnessFound, Outcome::NoWitnessFound)
    } else {
        (Outcome::Violated, Outcome::Satisfied, Outcome::NoViolationFound)
    };
    let pruned = match run.prune(prod, opts.interval_pruning) {
        Ok(a) => a,
        Err(e) => return run.verdict(procedure, f, Outcome::ResourceExceeded, e.to_string()),
    };
    let empty_detail = if existential {
        "the product has no accepted trace left after sound pruning, so no witness exists"
    } else {
        "the product with the negated formula has no accepted trace left after sound pruning"
    };
    match find_feasible_lasso(&pruned, opts.lasso_bounds(), &run.solver) {
        LassoSearch::Empty => run.verdict(procedure, f, none, empty_detail.into()),
        LassoSearch::Exhausted {
            checked,
            unknown,
            truncated,
        } => {
            let detail = format!(
                "no feasible lasso among {checked} candidates (stem bound {}, {unknown} undecided{})",
                opts.stem_bound,
                if truncated { ", enumeration truncated" } else { "" }
            );
            run.verdict(procedure, f, none_bounded, detail)
        }
        LassoSearch::Found(l) => {
            let traces_out = decompose(p, &l, &traces, &run.solver);
            let holds = semantic_value(core, &traces_out, !traces.is_empty());
            let semantic = holds.map(|h| h == existential);
            let mut v = run.verdict(procedure, f, found, String::new());
            v.lasso = Some(combined(&l));
            v.traces = traces_out;
            v.semantic_check = semantic;
            if !v.is_validated() {
                v.outcome = none_bounded;
                v.detail = "a lasso was found but failed re-validation".into();
            } else {
                v.detail = if existential {
                    "feasible lasso of the product with the formula".into()
                } else {
                    "feasible lasso of the product with the negated formula".into()
                };
            }
            v
        }
    }
}

/// TSL(T): `P` satisfies `φ` iff `P ⊗ A_¬φ` has no feasible trace.
pub fn check_tsl(p: &ProgramAutomaton, f: &Formula, opts: &CheckOptions, solver: &dyn Solver) -> Result<Verdict, CheckError> {
    assert!(f.prefix.is_empty(), "check_tsl needs a formula without quantifiers");
    let core = prepare(p, f)?;
    let neg = TemporalFormula::not(core.clone());
    Ok(alternation_free(p, f, &core, neg, Procedure::Tsl, opts, solver))
}

/// Universal HyperTSL(T) through the n-fold self-composition.
pub fn check_universal(
    p: &ProgramAutomaton,
    f: &Formula,
    opts: &CheckOptions,
    solver: &dyn Solver,
) -> Result<Verdict, CheckError> {
    let core = prepare(p, f)?;
    let neg = TemporalFormula::not(core.clone());
    Ok(alternation_free(p, f, &core, neg, Procedure::Universal, opts, solver))
}

/// Existential HyperTSL(T): a feasible trace of `Pⁿ ⊗ A_ψ` is a witness.
pub fn check_existential(
    p: &ProgramAutomaton,
    f: &Formula,
    opts: &CheckOptions,
    solver: &dyn Solver,
) -> Result<Verdict, CheckError> {
    let core = prepare(p, f)?;
    Ok(alternation_free(p, f, &core, core.clone(), Procedure::Existential, opts, solver))
}

/// Refutation of `∀π₁…π_m ∃π_{m+1}…π_n. ψ`: a feasible trace of
/// `P^m \ (Pⁿ ⊗ A_ψ)^∀_{k,C(k′)}` is a counterexample.
pub fn refute_forall_exists(
    p: &ProgramAutomaton,
    f: &Formula,
    opts: &CheckOptions,
    solver: &dyn Solver,
) -> Result<Verdict, CheckError> {
    let m = f.prefix.iter().take_while(|(q, _)| *q == Quantifier::Forall).count();
    if m == 0 || m == f.prefix.len() || f.prefix[m..].iter().any(|(q, _)| *q != Quantifier::Exists) {
        return Err(CheckError::Prefix(prefix_text(f)));
    }
    let core = prepare(p, f)?;
    let traces = f.traces();
    let procedure = Procedure::ForallExists;
    let mut run = Run::new(opts, solver);
    run.record(Stage::Raw, &p.with_provenance());
    let pn = self_compose(p, &traces);
    run.record(Stage::SelfComposed, &pn);
    let (ltl, atoms) = ltl_skeleton(&core);
    let aut = translate(&ltl, atoms.len());
    let prod = combined_product(&pn, &aut, &atoms);
    run.record(Stage::Product, &prod);
    let pruned = match run.prune(prod, false) {
        Ok(a) => a,
        Err(e) => return Ok(run.verdict(procedure, f, Outcome::ResourceExceeded, e.to_string())),
    };
    let pm = self_compose(p, &traces[..m]);
    let proj = universal_projection(&pruned, m, &pm.universe);
    run.record(Stage::Projected, &proj);
    let diff = match difference(&pm.automaton, &proj.automaton, opts.complement_budget) {
        Ok(d) => pm.with_automaton(d),
        Err(e) => return Ok(run.verdict(procedure, f, Outcome::ResourceExceeded, e.to_string())),
    };
    run.record(Stage::Difference, &diff);
    match find_feasible_lasso(&diff, opts.lasso_bounds(), &run.solver) {
        LassoSearch::Empty => Ok(run.verdict(
            procedure,
            f,
            Outcome::NoViolationFound,
            "every trace tuple of the universal traces keeps a candidate partner in the projection".into(),
        )),
        LassoSearch::Exhausted {
            checked,
            unknown,
            truncated,
        } => {
            let detail = format!(
                "no feasible lasso of the difference among {checked} candidates (stem bound {}, {unknown} undecided{})",
                opts.stem_bound,
                if truncated { ", enumeration truncated" } else { "" }
            );
            Ok(run.verdict(procedure, f, Outcome::NoViolationFound, detail))
        }
        LassoSearch::Found(l) => {
            let universal: Vec<String> = traces[..m].to_vec();
            let traces_out = decompose(p, &l, &universal, &run.solver);
            let partner = if traces.len() - m == 1 {
                partner::check_partners(p, &core, &traces, &traces_out, opts, &run.solver)
            } else {
                PartnerCheck::skipped(opts.partner_bound, "only run for a single existential trace")
            };
            let mut v = run.verdict(procedure, f, Outcome::Violated, String::new());
            v.lasso = Some(combined(&l));
            v.traces = traces_out;
            v.partner = Some(partner);
            if v.is_validated() {
                v.detail = "feasible trace of the universal traces without a partner in the projection".into();
            } else {
                v.outcome = Outcome::NoViolationFound;
                v.detail = "a lasso was found but failed re-validation".into();
            }
            Ok(v)
        }
    }
}

fn prefix_text(f: &Formula) -> String {
    f.prefix
        .iter()
        .map(|(q, t)| format!("{} {t}.", q.keyword()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Dispatches on the quantifier prefix.
pub fn check(p: &ProgramAutomaton, f: &Formula, opts: &CheckOptions, solver: &dyn Solver) -> Result<Verdict, CheckError> {
    let all = |q: Quantifier| f.prefix.iter().all(|(x, _)| *x == q);
    if f.prefix.is_empty() {
        check_tsl(p, f, opts, solver)
    } else if all(Quantifier::Forall) {
        check_universal(p, f, opts, solver)
    } else if all(Quantifier::Exists) {
        check_existential(p, f, opts, solver)
    } else {
        refute_forall_exists(p, f, opts, solver)
    }
}
