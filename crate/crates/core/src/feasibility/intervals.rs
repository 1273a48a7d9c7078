//! Interval analysis over program automata. Transitions that no state
//! reachable from the initial assignment can take are dropped.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use crate::program::{ProgramAutomaton, Statement};
use crate::terms::{Ident, Op, Term, Value};

/// A possibly unbounded integer interval; `None` marks an infinite end.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Itv {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

impl Itv {
    const TOP: Itv = Itv { lo: None, hi: None };

    fn point(v: BigInt) -> Itv {
        Itv {
            lo: Some(v.clone()),
            hi: Some(v),
        }
    }

    fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(l), Some(h)) if l > h)
    }

    fn join(&self, o: &Itv) -> Itv {
        Itv {
            lo: match (&self.lo, &o.lo) {
                (Some(a), Some(b)) => Some(a.min(b).clone()),
                _ => None,
            },
            hi: match (&self.hi, &o.hi) {
                (Some(a), Some(b)) => Some(a.max(b).clone()),
                _ => None,
            },
        }
    }

    fn meet(&self, o: &Itv) -> Itv {
        let pick = |a: &Option<BigInt>, b: &Option<BigInt>, max: bool| match (a, b) {
            (Some(x), Some(y)) => Some(if max { x.max(y) } else { x.min(y) }.clone()),
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        };
        Itv {
            lo: pick(&self.lo, &o.lo, true),
            hi: pick(&self.hi, &o.hi, false),
        }
    }

    fn add(&self, o: &Itv) -> Itv {
        let f = |a: &Option<BigInt>, b: &Option<BigInt>| match (a, b) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        Itv {
            lo: f(&self.lo, &o.lo),
            hi: f(&self.hi, &o.hi),
        }
    }

    fn neg(&self) -> Itv {
        Itv {
            lo: self.hi.as_ref().map(|x| -x),
            hi: self.lo.as_ref().map(|x| -x),
        }
    }

    fn mul(&self, o: &Itv) -> Itv {
        match (&self.lo, &self.hi, &o.lo, &o.hi) {
            (Some(a), Some(b), Some(c), Some(d)) => {
                let prods = [a * c, a * d, b * c, b * d];
                Itv {
                    lo: prods.iter().min().cloned(),
                    hi: prods.iter().max().cloned(),
                }
            }
            _ => match (self.as_point(), o.as_point()) {
                (Some(k), _) => o.scale(&k),
                (_, Some(k)) => self.scale(&k),
                _ => Itv::TOP,
            },
        }
    }

    fn scale(&self, k: &BigInt) -> Itv {
        let zero = BigInt::from(0);
        if *k == zero {
            return Itv::point(zero);
        }
        let s = Itv {
            lo: self.lo.as_ref().map(|x| x * k),
            hi: self.hi.as_ref().map(|x| x * k),
        };
        if *k < zero {
            Itv { lo: s.hi, hi: s.lo }
        } else {
            s
        }
    }

    fn as_point(&self) -> Option<BigInt> {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        }
    }
}

type Env = BTreeMap<Ident, Itv>;

fn eval(t: &Term, env: &Env) -> Itv {
    match t {
        Term::Const(Value::Int(n)) => Itv::point(n.clone()),
        Term::Var(x) => env.get(x).cloned().unwrap_or(Itv::TOP),
        Term::Apply(Op::Add, a) => eval(&a[0], env).add(&eval(&a[1], env)),
        Term::Apply(Op::Sub, a) => eval(&a[0], env).add(&eval(&a[1], env).neg()),
        Term::Apply(Op::Neg, a) => eval(&a[0], env).neg(),
        Term::Apply(Op::Mul, a) => eval(&a[0], env).mul(&eval(&a[1], env)),
        _ => Itv::TOP,
    }
}

fn negate(op: Op) -> Op {
    match op {
        Op::Eq => Op::Ne,
        Op::Ne => Op::Eq,
        Op::Lt => Op::Ge,
        Op::Le => Op::Gt,
        Op::Gt => Op::Le,
        Op::Ge => Op::Lt,
        other => other,
    }
}

fn flip(op: Op) -> Op {
    match op {
        Op::Lt => Op::Gt,
        Op::Le => Op::Ge,
        Op::Gt => Op::Lt,
        Op::Ge => Op::Le,
        other => other,
    }
}

/// The values of `x` compatible with `x op other`.
fn constrain(x: &Itv, op: Op, other: &Itv) -> Itv {
    let one = BigInt::from(1);
    let bound = match op {
        Op::Eq => other.clone(),
        Op::Lt => Itv {
            lo: None,
            hi: other.hi.as_ref().map(|h| h - &one),
        },
        Op::Le => Itv {
            lo: None,
            hi: other.hi.clone(),
        },
        Op::Gt => Itv {
            lo: other.lo.as_ref().map(|l| l + &one),
            hi: None,
        },
        Op::Ge => Itv {
            lo: other.lo.clone(),
            hi: None,
        },
        Op::Ne => match other.as_point() {
            Some(p) => {
                let mut r = x.clone();
                if r.lo.as_ref() == Some(&p) {
                    r.lo = Some(&p + &one);
                }
                if r.hi.as_ref() == Some(&p) {
                    r.hi = Some(&p - &one);
                }
                return r;
            }
            None => Itv::TOP,
        },
        _ => Itv::TOP,
    };
    x.meet(&bound)
}

fn compare(env: Env, op: Op, a: &Term, b: &Term) -> Option<Env> {
    if eval(a, &env).is_empty() || eval(b, &env).is_empty() {
        return None;
    }
    // a - b compared with 0 decides definite falsity
    let d = eval(a, &env).add(&eval(b, &env).neg());
    let zero = Itv::point(BigInt::from(0));
    if constrain(&d, op, &zero).is_empty() {
        return None;
    }
    let mut env = env;
    for (side, other, o) in [(a, b, op), (b, a, flip(op))] {
        if let Term::Var(x) = side {
            let cur = env.get(x).cloned().unwrap_or(Itv::TOP);
            let narrowed = constrain(&cur, o, &eval(other, &env));
            if narrowed.is_empty() {
                return None;
            }
            if env.contains_key(x) {
                env.insert(x.clone(), narrowed);
            }
        }
    }
    Some(env)
}

fn join_env(a: Option<Env>, b: Option<Env>) -> Option<Env> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(
            a.iter()
                .map(|(x, i)| (x.clone(), b.get(x).map_or(Itv::TOP, |j| i.join(j))))
                .collect(),
        ),
    }
}

fn refine(env: Env, t: &Term, positive: bool) -> Option<Env> {
    match t {
        Term::Const(Value::Bool(b)) => (*b == positive).then_some(env),
        Term::Apply(Op::Not, a) => refine(env, &a[0], !positive),
        Term::Apply(Op::And, a) if positive => refine(refine(env, &a[0], true)?, &a[1], true),
        Term::Apply(Op::Or, a) if !positive => refine(refine(env, &a[0], false)?, &a[1], false),
        Term::Apply(Op::And, a) => join_env(refine(env.clone(), &a[0], false), refine(env, &a[1], false)),
        Term::Apply(Op::Or, a) => join_env(refine(env.clone(), &a[0], true), refine(env, &a[1], true)),
        Term::Apply(op @ (Op::Eq | Op::Ne | Op::Lt | Op::Le | Op::Gt | Op::Ge), a) => {
            let op = if positive { *op } else { negate(*op) };
            compare(env, op, &a[0], &a[1])
        }
        _ => Some(env),
    }
}

fn post(env: &Env, s: &Statement) -> Option<Env> {
    let mut env = env.clone();
    for b in s.flatten() {
        match b {
            Statement::Assert(p) => env = refine(env, p.term(), true)?,
            Statement::Assign(c, e) => {
                let v = eval(&e, &env);
                if v.is_empty() {
                    return None;
                }
                env.insert(c, v);
            }
            Statement::Havoc(c) => {
                env.insert(c, Itv::TOP);
            }
            Statement::Seq(..) => unreachable!("flattened"),
        }
    }
    Some(env)
}

fn widen(old: &Env, new: &Env) -> Env {
    old.iter()
        .map(|(x, o)| {
            let n = &new[x];
            let lo = if n.lo == o.lo { o.lo.clone() } else { None };
            let hi = if n.hi == o.hi { o.hi.clone() } else { None };
            (x.clone(), Itv { lo, hi })
        })
        .collect()
}

/// Drops every transition whose statement cannot complete from any state
/// the interval analysis deems reachable, then trims.
pub fn prune_by_intervals<T: Clone>(p: &ProgramAutomaton<T>) -> ProgramAutomaton<T> {
    let a = &p.automaton;
    let u = &p.universe;
    let init: Env = u
        .framed
        .iter()
        .map(|x| {
            let itv = match u.initial.get(x) {
                Ok(Value::Int(v)) => Itv::point(v.clone()),
                _ => Itv::point(BigInt::from(0)),
            };
            (x.clone(), itv)
        })
        .collect();
    let mut states: Vec<Option<Env>> = vec![None; a.num_states()];
    let mut visits = vec![0usize; a.num_states()];
    states[a.initial()] = Some(init);
    let mut work = VecDeque::from([a.initial()]);
    while let Some(q) = work.pop_front() {
        let Some(env) = states[q].clone() else { continue };
        for &i in a.outgoing(q) {
            let t = a.transition(i);
            let Some(out) = post(&env, &t.label) else { continue };
            let old = states[t.to].clone();
            let joined = join_env(old.clone(), Some(out)).expect("nonempty");
            let next = match &old {
                Some(o) if visits[t.to] >= 3 => widen(o, &joined),
                _ => joined,
            };
            if old.as_ref() != Some(&next) {
                visits[t.to] += 1;
                states[t.to] = Some(next);
                work.push_back(t.to);
            }
        }
    }
    let pruned = a.relabel(|t| {
        let env = states[t.from].as_ref()?;
        post(env, &t.label)?;
        Some((t.label.clone(), t.tag.clone()))
    });
    p.with_automaton(pruned.trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program_automaton;

    #[test]
    fn countdown_never_turns_positive() {
        let p = parse_program_automaton(
            "cells: n\nstate q0 initial accepting\nstate q1 accepting\nstate q2 accepting\n\
             trans q0 -> q1 : n := 0\ntrans q1 -> q1 : n--\ntrans q1 -> q2 : assert(n > 0)\n\
             trans q2 -> q2 : n--\n",
        )
        .unwrap();
        let pruned = prune_by_intervals(&p);
        assert_eq!(pruned.automaton.num_states(), 2);
    }

    #[test]
    fn havoc_keeps_everything() {
        let p = parse_program_automaton(
            "cells: n\nstate q0 initial accepting\nstate q1 accepting\n\
             trans q0 -> q1 : n := *\ntrans q1 -> q1 : assert(n > 5); n--\n",
        )
        .unwrap();
        assert_eq!(prune_by_intervals(&p).automaton.transitions().len(), 2);
    }
}
