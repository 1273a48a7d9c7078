//! Text and JSON renderings of a verdict.

use std::fmt::Write as _;

use serde_json::{json, Value as Json};

use crate::feasibility::CycleVerdict;
use crate::program::Statement;
use crate::terms::{Assignment, Value};

use super::{TraceWitness, Verdict};

fn join(stmts: &[Statement]) -> String {
    stmts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" | ")
}

fn assignment_json(a: &Assignment) -> Json {
    let mut map = serde_json::Map::new();
    for (k, v) in a.iter() {
        let value = match v {
            Value::Int(n) => match i64::try_from(n) {
                Ok(i) => json!(i),
                Err(_) => json!(n.to_string()),
            },
            Value::Bool(b) => json!(b),
        };
        map.insert(k.to_string(), value);
    }
    Json::Object(map)
}

fn strings(stmts: &[Statement]) -> Json {
    json!(stmts.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn trace_json(t: &TraceWitness) -> Json {
    json!({
        "trace": t.trace,
        "stem": strings(&t.stem),
        "loop": strings(&t.cycle),
        "periodic": t.periodic,
        "recurrent": t.recurrent,
        "iterations": t.iterations,
        "revalidated": t.revalidated,
        "computation": {
            "initial": assignment_json(&t.initial),
            "stem": t.stem_states.iter().map(assignment_json).collect::<Vec<_>>(),
            "loop": t.cycle_states.iter().map(assignment_json).collect::<Vec<_>>(),
        },
    })
}

impl Verdict {
    /// Machine-readable report.
    pub fn to_json(&self) -> Json {
        let o = &self.options;
        json!({
            "outcome": self.outcome.name(),
            "exit_code": self.outcome.exit_code(),
            "procedure": self.procedure.name(),
            "formula": self.formula,
            "detail": self.detail,
            "lasso": self.lasso.as_ref().map(|l| json!({
                "stem_states": l.stem_states,
                "stem": strings(&l.stem),
                "loop_states": l.cycle_states,
                "loop": strings(&l.cycle),
            })),
            "traces": self.traces.iter().map(trace_json).collect::<Vec<_>>(),
            "semantic_check": self.semantic_check,
            "partner_check": self.partner.as_ref().map(|p| json!({
                "bound": p.bound,
                "candidates": p.candidates,
                "refuted": p.refuted,
                "partners": p.partners,
                "truncated": p.truncated,
                "skipped": p.skipped,
                "confirmed": p.confirmed(),
            })),
            "cycles": self.cycles.iter().map(|c| json!({
                "iteration": c.iteration,
                "states": c.states,
                "labels": strings(&c.labels),
                "infeasible": c.verdict.is_infeasible(),
                "verdict": c.verdict.to_string(),
            })).collect::<Vec<_>>(),
            "stages": self.sizes.iter().map(|s| json!({
                "stage": s.stage.name(),
                "states": s.states,
                "transitions": s.transitions,
            })).collect::<Vec<_>>(),
            "solver": {
                "name": self.solver_name,
                "queries": self.solver.queries,
                "sat": self.solver.sat,
                "unsat": self.solver.unsat,
                "unknown": self.solver.unknown,
            },
            "bounds": {
                "k": o.k,
                "cycle_iters": o.cycle_iters,
                "stem_bound": o.stem_bound,
                "cycle_limit": o.cycle_limit,
                "max_lassos": o.max_lassos,
                "complement_budget": o.complement_budget,
                "partner_bound": o.partner_bound,
                "interval_pruning": o.interval_pruning,
            },
        })
    }

    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", self.outcome);
        let _ = writeln!(s, "procedure: {}", self.procedure.name());
        let _ = writeln!(s, "formula: {}", self.formula);
        if !self.detail.is_empty() {
            let _ = writeln!(s, "reason: {}", self.detail);
        }
        if let Some(l) = &self.lasso {
            let _ = writeln!(s, "lasso:");
            let _ = writeln!(s, "  stem: {}", join(&l.stem));
            let _ = writeln!(s, "  loop: {}", join(&l.cycle));
        }
        for t in &self.traces {
            let name = if t.trace.is_empty() { "trace".to_string() } else { format!("trace {}", t.trace) };
            let _ = writeln!(s, "{name}:");
            let _ = writeln!(s, "  stem: {}", join(&t.stem));
            let _ = writeln!(s, "  loop: {}", join(&t.cycle));
            let kind = if t.periodic {
                "periodic"
            } else if t.recurrent {
                "prefix; the loop guard is preserved by every pass"
            } else {
                "prefix; the loop cannot block"
            };
            let _ = writeln!(s, "  computation ({kind}):");
            let _ = writeln!(s, "    -1: {}", t.initial);
            for (i, a) in t.stem_states.iter().chain(&t.cycle_states).enumerate() {
                let mark = if i == t.stem_states.len() { "  <- loop" } else { "" };
                let _ = writeln!(s, "    {i}: {a}{mark}");
            }
            let _ = writeln!(s, "  revalidated: {}", if t.revalidated { "yes" } else { "no" });
        }
        if let Some(ok) = self.semantic_check {
            let _ = writeln!(s, "semantic check: {}", if ok { "passed" } else { "FAILED" });
        }
        if let Some(p) = &self.partner {
            match &p.skipped {
                Some(why) => {
                    let _ = writeln!(s, "partner check: skipped ({why})");
                }
                None => {
                    let _ = writeln!(
                        s,
                        "partner check (secondary): {} of {} lassos with stem and loop <= {} refuted as partners, {} feasible partners{}",
                        p.refuted,
                        p.candidates,
                        p.bound,
                        p.partners,
                        if p.truncated { ", truncated" } else { "" }
                    );
                }
            }
        }
        if !self.cycles.is_empty() {
            let _ = writeln!(s, "cycles:");
            for c in &self.cycles {
                let shown = match &c.verdict {
                    CycleVerdict::Infeasible(_) => c.verdict.to_string(),
                    CycleVerdict::Unknown(_) => "kept".to_string(),
                };
                let _ = writeln!(s, "  [{}] {}: {}", c.iteration, join(&c.labels), shown);
            }
        }
        let _ = writeln!(s, "stages:");
        for st in &self.sizes {
            let _ = writeln!(s, "  {}: {} states, {} transitions", st.stage, st.states, st.transitions);
        }
        let st = &self.solver;
        let _ = writeln!(
            s,
            "solver: {} ({} queries: {} sat, {} unsat, {} unknown)",
            self.solver_name, st.queries, st.sat, st.unsat, st.unknown
        );
        let o = &self.options;
        let _ = writeln!(
            s,
            "bounds: k={} cycle-iters={} stem-bound={} complement-budget={}",
            o.k, o.cycle_iters, o.stem_bound, o.complement_budget
        );
        s
    }
}
