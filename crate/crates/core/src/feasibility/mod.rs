//! Feasibility analysis of program automata: solver backends, constraint
//! encoding, k-feasibility, infeasible-cycle removal and lasso search.

mod builtin;
pub mod cycles;
pub mod encode;
pub mod intervals;
pub mod lasso;
mod smt;
mod smtlib;
pub mod window;

use std::cell::Cell;

pub use builtin::BuiltinSolver;
pub use cycles::{
    cycle_automaton, cycle_infeasible, remove_infeasible_cycles, verify_ranking, CycleReport,
    CycleRemoval, CycleVerdict, Infeasibility, RankingFunction,
};
pub use encode::{encode_window, Encoder, Init};
pub use intervals::prune_by_intervals;
pub use lasso::{check_lasso, find_feasible_lasso, Attempt, FeasibleLasso, LassoBounds, LassoSearch, Witness};
pub use smt::{unsat_core, Query, Solver, SolverResult};
pub use smtlib::{parse_response, script, to_smtlib, SmtLibSolver};
pub use window::{k_window_feasible, remove_k_infeasibility};

/// Counters over the queries sent to a solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct SolverStats {
    pub queries: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
}

/// Wraps a solver and counts its answers.
pub struct CountingSolver<'a> {
    inner: &'a dyn Solver,
    stats: Cell<SolverStats>,
}

impl<'a> CountingSolver<'a> {
    pub fn new(inner: &'a dyn Solver) -> Self {
        CountingSolver {
            inner,
            stats: Cell::new(SolverStats::default()),
        }
    }

    pub fn stats(&self) -> SolverStats {
        self.stats.get()
    }
}

impl Solver for CountingSolver<'_> {
    fn check(&self, q: &Query) -> SolverResult {
        let r = self.inner.check(q);
        let mut s = self.stats.get();
        s.queries += 1;
        match r {
            SolverResult::Sat(_) => s.sat += 1,
            SolverResult::Unsat => s.unsat += 1,
            SolverResult::Unknown(_) => s.unknown += 1,
        }
        self.stats.set(s);
        r
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}
