//! The built-in solver for linear integer arithmetic.
//!
//! Assertions are put in negation normal form over linear atoms
//! (`e <= 0`, `e = 0`) and split into conjunctions. Each conjunction is
//! simplified by solving equalities with a unit coefficient, refuted by
//! Fourier–Motzkin elimination with gcd tightening where possible, and
//! otherwise searched for an integer model. The search is exhaustive
//! inside the bounds implied by the eliminated system and gives up with
//! `Unknown` when a variable's range is wider than the value window.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::terms::{Assignment, Ident, Op, Sort, Term, Value};

use super::smt::{Query, Solver, SolverResult};

/// `Σ coeffs[x]·x + k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Lin {
    coeffs: BTreeMap<Ident, BigInt>,
    k: BigInt,
}

impl Lin {
    fn constant(k: BigInt) -> Lin {
        Lin {
            coeffs: BTreeMap::new(),
            k,
        }
    }

    fn var(x: Ident) -> Lin {
        Lin {
            coeffs: BTreeMap::from([(x, BigInt::one())]),
            k: BigInt::zero(),
        }
    }

    fn add(mut self, other: &Lin, factor: &BigInt) -> Lin {
        for (x, c) in &other.coeffs {
            let e = self.coeffs.entry(x.clone()).or_insert_with(BigInt::zero);
            *e += c * factor;
            if e.is_zero() {
                self.coeffs.remove(x);
            }
        }
        self.k += &other.k * factor;
        self
    }

    fn scale(mut self, f: &BigInt) -> Lin {
        if f.is_zero() {
            return Lin::constant(BigInt::zero());
        }
        for c in self.coeffs.values_mut() {
            *c *= f;
        }
        self.k *= f;
        self
    }

    fn minus(self, other: &Lin) -> Lin {
        self.add(other, &-BigInt::one())
    }

    fn plus_const(mut self, k: i64) -> Lin {
        self.k += k;
        self
    }

    fn coeff(&self, x: &Ident) -> BigInt {
        self.coeffs.get(x).cloned().unwrap_or_default()
    }

    /// Replaces `x` by `e`.
    fn substitute(&self, x: &Ident, e: &Lin) -> Lin {
        match self.coeffs.get(x) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut rest = self.clone();
                rest.coeffs.remove(x);
                rest.add(e, &c)
            }
        }
    }

    fn eval(&self, m: &BTreeMap<Ident, BigInt>) -> BigInt {
        let mut v = self.k.clone();
        for (x, c) in &self.coeffs {
            if let Some(val) = m.get(x) {
                v += c * val;
            }
        }
        v
    }

    fn gcd(&self) -> BigInt {
        self.coeffs
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides `e <= 0` by the coefficient gcd, rounding the constant up.
    fn tighten(self) -> Lin {
        let g = self.gcd();
        if g.is_zero() || g.is_one() {
            return self;
        }
        Lin {
            coeffs: self.coeffs.into_iter().map(|(x, c)| (x, c / &g)).collect(),
            k: self.k.div_ceil(&g),
        }
    }
}

#[derive(Debug, Clone)]
enum F {
    Bool(bool),
    Le(Lin),
    Eq(Lin),
    And(Vec<F>),
    Or(Vec<F>),
}

fn lin(t: &Term) -> Result<Lin, String> {
    match t {
        Term::Const(Value::Int(n)) => Ok(Lin::constant(n.clone())),
        Term::Const(Value::Bool(_)) => Err("boolean in arithmetic position".into()),
        Term::Var(x) => Ok(Lin::var(x.clone())),
        Term::Apply(op, args) => match op {
            Op::Add => Ok(lin(&args[0])?.add(&lin(&args[1])?, &BigInt::one())),
            Op::Sub => Ok(lin(&args[0])?.minus(&lin(&args[1])?)),
            Op::Neg => Ok(lin(&args[0])?.scale(&-BigInt::one())),
            Op::Mul => {
                let (a, b) = (lin(&args[0])?, lin(&args[1])?);
                if a.coeffs.is_empty() {
                    Ok(b.scale(&a.k))
                } else if b.coeffs.is_empty() {
                    Ok(a.scale(&b.k))
                } else {
                    Err(format!("non-linear term `{t}`"))
                }
            }
            _ => Err(format!("boolean term `{t}` in arithmetic position")),
        },
    }
}

fn formula(t: &Term, positive: bool) -> Result<F, String> {
    let cmp = |a: &Term, b: &Term| -> Result<Lin, String> { Ok(lin(a)?.minus(&lin(b)?)) };
    match t {
        Term::Const(Value::Bool(b)) => Ok(F::Bool(*b == positive)),
        Term::Const(Value::Int(_)) | Term::Var(_) => Err(format!("`{t}` is not boolean")),
        Term::Apply(op, args) => {
            let (a, b) = (&args[0], args.get(1));
            Ok(match (op, positive) {
                (Op::Not, p) => formula(a, !p)?,
                (Op::And, true) | (Op::Or, false) => {
                    F::And(vec![formula(a, positive)?, formula(b.unwrap(), positive)?])
                }
                (Op::And, false) | (Op::Or, true) => {
                    F::Or(vec![formula(a, positive)?, formula(b.unwrap(), positive)?])
                }
                (Op::Eq | Op::Ne, _) if a.sort() == Ok(Sort::Bool) => {
                    let same = (*op == Op::Eq) == positive;
                    let b = b.unwrap();
                    F::Or(vec![
                        F::And(vec![formula(a, true)?, formula(b, same)?]),
                        F::And(vec![formula(a, false)?, formula(b, !same)?]),
                    ])
                }
                (Op::Eq, true) | (Op::Ne, false) => F::Eq(cmp(a, b.unwrap())?),
                (Op::Eq, false) | (Op::Ne, true) => {
                    let d = cmp(a, b.unwrap())?;
                    F::Or(vec![
                        F::Le(d.clone().plus_const(1)),
                        F::Le(d.scale(&-BigInt::one()).plus_const(1)),
                    ])
                }
                (Op::Lt, true) | (Op::Ge, false) => F::Le(cmp(a, b.unwrap())?.plus_const(1)),
                (Op::Le, true) | (Op::Gt, false) => F::Le(cmp(a, b.unwrap())?),
                (Op::Gt, true) | (Op::Le, false) => F::Le(cmp(b.unwrap(), a)?.plus_const(1)),
                (Op::Ge, true) | (Op::Lt, false) => F::Le(cmp(b.unwrap(), a)?),
                _ => return Err(format!("`{t}` is not boolean")),
            })
        }
    }
}

enum Conj {
    Sat(BTreeMap<Ident, BigInt>),
    Unsat,
    Unknown(String),
}

/// A conjunction after equality elimination: substitutions to replay in
/// reverse and the remaining inequalities.
struct Reduced {
    subs: Vec<(Ident, Lin)>,
    les: Vec<Lin>,
}

fn reduce(mut les: Vec<Lin>, mut eqs: Vec<Lin>) -> Option<Reduced> {
    let mut subs: Vec<(Ident, Lin)> = Vec::new();
    while let Some(e) = eqs.pop() {
        if e.coeffs.is_empty() {
            if !e.k.is_zero() {
                return None;
            }
            continue;
        }
        let g = e.gcd();
        if !(&e.k % &g).is_zero() {
            return None;
        }
        let unit = e
            .coeffs
            .iter()
            .find(|(_, c)| c.abs().is_one())
            .map(|(x, c)| (x.clone(), c.clone()));
        match unit {
            Some((x, c)) => {
                // c·x + rest = 0  ⇒  x = -c·rest  (c = ±1)
                let mut rest = e.clone();
                rest.coeffs.remove(&x);
                let value = rest.scale(&-c);
                for l in les.iter_mut().chain(eqs.iter_mut()) {
                    *l = l.substitute(&x, &value);
                }
                for (_, s) in subs.iter_mut() {
                    *s = s.substitute(&x, &value);
                }
                subs.push((x, value));
            }
            None => {
                les.push(e.clone());
                les.push(e.scale(&-BigInt::one()));
            }
        }
    }
    let mut out = BTreeSet::new();
    for l in les {
        let l = l.tighten();
        if l.coeffs.is_empty() {
            if l.k.is_positive() {
                return None;
            }
            continue;
        }
        out.insert(l);
    }
    Some(Reduced {
        subs,
        les: out.into_iter().collect(),
    })
}

/// Fourier–Motzkin elimination. Returns the elimination order with the
/// constraints attached to each variable, the constraints left when the
/// size cap was hit, and whether a contradiction was derived.
struct Elimination {
    levels: Vec<(Ident, Vec<Lin>)>,
    rest: Vec<Lin>,
    contradiction: bool,
}

fn eliminate(les: Vec<Lin>, cap: usize) -> Elimination {
    let mut cur: BTreeSet<Lin> = les.into_iter().collect();
    let mut levels = Vec::new();
    loop {
        let vars: BTreeSet<Ident> = cur.iter().flat_map(|l| l.coeffs.keys().cloned()).collect();
        // cheapest variable first: fewest generated constraints
        let Some(x) = vars.iter().min_by_key(|x| {
            let pos = cur.iter().filter(|l| l.coeff(x).is_positive()).count();
            let neg = cur.iter().filter(|l| l.coeff(x).is_negative()).count();
            pos * neg
        }) else {
            return Elimination {
                levels,
                rest: Vec::new(),
                contradiction: false,
            };
        };
        let x = x.clone();
        let (with, without): (Vec<Lin>, Vec<Lin>) =
            cur.iter().cloned().partition(|l| l.coeffs.contains_key(&x));
        let pos: Vec<&Lin> = with.iter().filter(|l| l.coeff(&x).is_positive()).collect();
        let neg: Vec<&Lin> = with.iter().filter(|l| l.coeff(&x).is_negative()).collect();
        if without.len() + pos.len() * neg.len() > cap {
            return Elimination {
                levels,
                rest: cur.into_iter().collect(),
                contradiction: false,
            };
        }
        let mut next: BTreeSet<Lin> = without.into_iter().collect();
        for p in &pos {
            for n in &neg {
                let cp = p.coeff(&x);
                let cn = -n.coeff(&x);
                let combined = (*p).clone().scale(&cn).add(n, &cp).tighten();
                if combined.coeffs.is_empty() {
                    if combined.k.is_positive() {
                        return Elimination {
                            levels,
                            rest: Vec::new(),
                            contradiction: true,
                        };
                    }
                } else {
                    next.insert(combined);
                }
            }
        }
        levels.push((x, with));
        cur = next;
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinSolver {
    /// Largest number of candidate values tried per variable is
    /// `2·value_bound + 1`.
    pub value_bound: u64,
    pub node_limit: usize,
    pub split_limit: usize,
    pub fm_cap: usize,
}

impl Default for BuiltinSolver {
    fn default() -> Self {
        BuiltinSolver {
            value_bound: 32,
            node_limit: 200_000,
            split_limit: 20_000,
            fm_cap: 4_000,
        }
    }
}

impl BuiltinSolver {
    pub fn with_bound(value_bound: u64) -> Self {
        BuiltinSolver {
            value_bound,
            ..BuiltinSolver::default()
        }
    }

    fn refuted(&self, les: &[Lin], eqs: &[Lin]) -> bool {
        match reduce(les.to_vec(), eqs.to_vec()) {
            None => true,
            Some(r) => eliminate(r.les, self.fm_cap).contradiction,
        }
    }

    fn solve_conj(&self, les: Vec<Lin>, eqs: Vec<Lin>) -> Conj {
        let Some(r) = reduce(les, eqs) else {
            return Conj::Unsat;
        };
        let elim = eliminate(r.les.clone(), self.fm_cap);
        if elim.contradiction {
            return Conj::Unsat;
        }
        // search order: leftover variables, then eliminated ones in reverse
        let mut order: Vec<(Ident, Vec<Lin>)> = Vec::new();
        let leftover: Vec<Ident> = elim
            .rest
            .iter()
            .flat_map(|l| l.coeffs.keys().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for (pos, x) in leftover.iter().enumerate() {
            let attached = elim
                .rest
                .iter()
                .filter(|l| {
                    l.coeffs.contains_key(x)
                        && l.coeffs.keys().all(|y| leftover.iter().position(|z| z == y).unwrap() <= pos)
                })
                .cloned()
                .collect();
            order.push((x.clone(), attached));
        }
        for (x, cs) in elim.levels.iter().rev() {
            order.push((x.clone(), cs.clone()));
        }
        let mut search = Search {
            order: &order,
            model: BTreeMap::new(),
            nodes: 0,
            node_limit: self.node_limit,
            width: 2 * self.value_bound as usize + 1,
            clipped: false,
        };
        match search.run(0) {
            Some(()) => {
                let mut m = search.model;
                for (x, e) in r.subs.iter().rev() {
                    let v = e.eval(&m);
                    m.insert(x.clone(), v);
                }
                Conj::Sat(m)
            }
            None if search.clipped || search.nodes >= search.node_limit => {
                Conj::Unknown("search window exhausted".into())
            }
            None => Conj::Unsat,
        }
    }

    /// Splits disjunctions depth-first, refuting partial conjunctions early.
    fn split(
        &self,
        mut todo: Vec<F>,
        mut les: Vec<Lin>,
        mut eqs: Vec<Lin>,
        splits: &mut usize,
    ) -> Conj {
        while let Some(f) = todo.pop() {
            match f {
                F::Bool(true) => {}
                F::Bool(false) => return Conj::Unsat,
                F::Le(l) => les.push(l),
                F::Eq(l) => eqs.push(l),
                F::And(parts) => todo.extend(parts),
                F::Or(parts) => {
                    if self.refuted(&les, &eqs) {
                        return Conj::Unsat;
                    }
                    let mut unknown = None;
                    for p in parts {
                        *splits += 1;
                        if *splits > self.split_limit {
                            return Conj::Unknown("too many case splits".into());
                        }
                        let mut branch = todo.clone();
                        branch.push(p);
                        match self.split(branch, les.clone(), eqs.clone(), splits) {
                            Conj::Sat(m) => return Conj::Sat(m),
                            Conj::Unsat => {}
                            Conj::Unknown(r) => unknown = Some(r),
                        }
                    }
                    return match unknown {
                        Some(r) => Conj::Unknown(r),
                        None => Conj::Unsat,
                    };
                }
            }
        }
        self.solve_conj(les, eqs)
    }
}

struct Search<'a> {
    order: &'a [(Ident, Vec<Lin>)],
    model: BTreeMap<Ident, BigInt>,
    nodes: usize,
    node_limit: usize,
    width: usize,
    clipped: bool,
}

impl Search<'_> {
    fn bounds(&self, x: &Ident, cs: &[Lin]) -> (Option<BigInt>, Option<BigInt>) {
        let (mut lo, mut hi): (Option<BigInt>, Option<BigInt>) = (None, None);
        for l in cs {
            let c = l.coeff(x);
            let mut rest = l.clone();
            rest.coeffs.remove(x);
            let r = rest.eval(&self.model);
            // c·x + r <= 0
            if c.is_positive() {
                let b = (-r).div_floor(&c);
                hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
            } else {
                let b = r.div_ceil(&-c);
                lo = Some(lo.map_or(b.clone(), |h| h.max(b)));
            }
        }
        (lo, hi)
    }

    fn candidates(&mut self, lo: Option<BigInt>, hi: Option<BigInt>) -> Vec<BigInt> {
        let zero = BigInt::zero();
        let start = match (&lo, &hi) {
            (Some(l), _) if *l > zero => l.clone(),
            (_, Some(h)) if *h < zero => h.clone(),
            _ => zero,
        };
        let inside = |v: &BigInt| lo.as_ref().map_or(true, |l| v >= l) && hi.as_ref().map_or(true, |h| v <= h);
        let mut out = Vec::new();
        let mut step = BigInt::zero();
        while out.len() < self.width {
            let up = &start + &step;
            let down = &start - &step;
            let (a, b) = (inside(&up), inside(&down));
            if !a && !b {
                return out;
            }
            if a {
                out.push(up);
            }
            if b && !step.is_zero() && out.len() < self.width {
                out.push(down);
            }
            step += 1;
        }
        // the window is full: more values exist unless the range ends here
        let up = &start + &step;
        let down = &start - &step;
        if inside(&up) || inside(&down) {
            self.clipped = true;
        }
        out
    }

    fn run(&mut self, level: usize) -> Option<()> {
        if level == self.order.len() {
            return Some(());
        }
        let (x, cs) = &self.order[level];
        let (lo, hi) = self.bounds(x, cs);
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return None;
            }
        }
        for v in self.candidates(lo, hi) {
            self.nodes += 1;
            if self.nodes >= self.node_limit {
                return None;
            }
            self.model.insert(x.clone(), v);
            if self.run(level + 1).is_some() {
                return Some(());
            }
        }
        self.model.remove(x);
        None
    }
}

impl Solver for BuiltinSolver {
    fn check(&self, q: &Query) -> SolverResult {
        let mut parts = Vec::new();
        for a in &q.asserts {
            match formula(a, true) {
                Ok(f) => parts.push(f),
                Err(e) => return SolverResult::Unknown(e),
            }
        }
        let mut splits = 0;
        match self.split(parts, Vec::new(), Vec::new(), &mut splits) {
            Conj::Unsat => SolverResult::Unsat,
            Conj::Unknown(r) => SolverResult::Unknown(r),
            Conj::Sat(m) => {
                let model: Assignment = m.into_iter().map(|(x, v)| (x, Value::Int(v))).collect();
                match q.check_model(&model) {
                    Some(full) => SolverResult::Sat(full),
                    None => SolverResult::Unknown("model failed verification".into()),
                }
            }
        }
    }

    fn name(&self) -> String {
        format!("builtin(±{})", self.value_bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn q(asserts: &[&str]) -> Query {
        let mut q = Query::new();
        for a in asserts {
            q.assert(parse_term(a).unwrap());
        }
        q
    }

    #[test]
    fn simple_sat_and_unsat() {
        let s = BuiltinSolver::default();
        assert!(s.check(&q(&["x > 0", "x < 2"])).is_sat());
        assert!(s.check(&q(&["x > 0", "x < 1"])).is_unsat());
        assert!(s.check(&q(&["2 * x = 1"])).is_unsat());
        assert!(s.check(&q(&["x != x"])).is_unsat());
    }

    #[test]
    fn unbounded_unsat_is_proved() {
        let s = BuiltinSolver::with_bound(2);
        assert!(s.check(&q(&["x - y >= 1", "y - z >= 1", "z - x >= 0"])).is_unsat());
    }

    #[test]
    fn far_models_are_found_through_equalities() {
        let s = BuiltinSolver::with_bound(2);
        let r = s.check(&q(&["x = 1000", "y = x + 5", "y > 1001"]));
        let SolverResult::Sat(m) = r else { panic!("{r:?}") };
        assert_eq!(m.get(&Ident::cell("y")).unwrap(), &Value::int(1005));
    }

    #[test]
    fn disjunctions() {
        let s = BuiltinSolver::default();
        assert!(s.check(&q(&["x = 1 || x = 2", "x != 1", "x != 2"])).is_unsat());
        assert!(s.check(&q(&["!(x = 0 && y = 0)", "x = 0"])).is_sat());
    }

    #[test]
    fn integer_gap_without_rational_contradiction() {
        let s = BuiltinSolver::with_bound(8);
        // 3x = 2y + 1 with 0 <= x,y <= 1 has no solution
        let r = s.check(&q(&["3 * x - 2 * y = 1", "x >= 0", "x <= 0", "y >= 0", "y <= 1"]));
        assert!(r.is_unsat(), "{r:?}");
    }
}
