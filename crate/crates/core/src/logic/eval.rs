use num_integer::Integer;

use crate::ltl::Valuation;
use crate::terms::{holds, update_holds, Assignment, Computation, TermError};

use super::{AtomSet, Formula, Quantifier, Temporal, TemporalFormula, TslAtom};

fn atom_holds(a: &TslAtom, z: &Computation, t: usize) -> Result<bool, TermError> {
    match a {
        TslAtom::Pred(p) => holds(p, z.at(t as i64)),
        TslAtom::Upd(u) => update_holds(u, z.at(t as i64 - 1), z.at(t as i64)),
    }
}

/// Satisfaction of a quantifier-free formula at position `t`.
///
/// Update atoms compare a position with its predecessor, so the suffix of
/// an ultimately periodic computation repeats from position `stem + 1` on;
/// an until therefore only needs to look one period past that point.
pub fn eval_tsl(f: &TemporalFormula, z: &Computation, t: usize) -> Result<bool, TermError> {
    Ok(match f {
        Temporal::Const(b) => *b,
        Temporal::Atom(a) => atom_holds(a, z, t)?,
        Temporal::Not(a) => !eval_tsl(a, z, t)?,
        Temporal::And(a, b) => eval_tsl(a, z, t)? && eval_tsl(b, z, t)?,
        Temporal::Next(a) => eval_tsl(a, z, t + 1)?,
        Temporal::Until(a, b) => {
            let periodic_from = t.max(z.stem.len() + 1);
            let end = periodic_from + z.cycle.len();
            let mut result = false;
            for u in t..end {
                if eval_tsl(b, z, u)? {
                    result = true;
                    break;
                }
                if !eval_tsl(a, z, u)? {
                    break;
                }
            }
            result
        }
    })
}

/// The valuation word of a computation: position `t` holds the atoms true at
/// `t`. The returned stem covers positions `0..=stem`, because position
/// `stem` still compares against the stem for update atoms.
pub fn seq_of(
    z: &Computation,
    atoms: &AtomSet,
) -> Result<(Vec<Valuation>, Vec<Valuation>), TermError> {
    let letter = |t: usize| -> Result<Valuation, TermError> {
        let mut v = Valuation::default();
        for (i, a) in atoms.iter().enumerate() {
            if atom_holds(&a, z, t)? {
                v.set(i);
            }
        }
        Ok(v)
    };
    let stem_len = z.stem.len() + 1;
    let stem = (0..stem_len).map(letter).collect::<Result<_, _>>()?;
    let cycle = (stem_len..stem_len + z.cycle.len())
        .map(letter)
        .collect::<Result<_, _>>()?;
    Ok((stem, cycle))
}

/// Zips per-trace computations into one computation over trace-indexed
/// identifiers.
pub fn hyper_computation(parts: &[(&str, &Computation)]) -> Computation {
    let stem = parts.iter().map(|(_, z)| z.stem.len()).max().unwrap_or(0);
    let period = parts
        .iter()
        .fold(1usize, |acc, (_, z)| acc.lcm(&z.cycle.len()));
    let merge = |pick: &dyn Fn(&Computation) -> Assignment| -> Assignment {
        let mut out = Assignment::new();
        for (trace, z) in parts {
            out = out.merged(&pick(z).map_idents(|id| id.on_trace(trace)));
        }
        out
    };
    let initial = merge(&|z| z.initial.clone());
    let at = |t: usize| merge(&|z| z.at(t as i64).clone());
    Computation::new(
        initial,
        (0..stem).map(at).collect(),
        (stem..stem + period).map(at).collect(),
    )
}

/// Satisfaction of a prenex formula over a finite set of computations.
pub fn eval_hypertsl(f: &Formula, z: &[Computation]) -> Result<bool, TermError> {
    fn go<'a>(
        f: &Formula,
        z: &'a [Computation],
        level: usize,
        bound: &mut Vec<(&'a str, &'a Computation)>,
        names: &'a [String],
    ) -> Result<bool, TermError> {
        if level == f.prefix.len() {
            let hz = hyper_computation(bound);
            return eval_tsl(&f.core, &hz, 0);
        }
        let want_all = f.prefix[level].0 == Quantifier::Forall;
        for c in z {
            bound.push((names[level].as_str(), c));
            let r = go(f, z, level + 1, bound, names);
            bound.pop();
            if r? != want_all {
                return Ok(!want_all);
            }
        }
        Ok(want_all)
    }
    let names = f.traces();
    go(f, z, 0, &mut Vec::new(), &names)
}
