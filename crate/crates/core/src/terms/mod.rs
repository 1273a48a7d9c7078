//! Function terms over memory cells and inputs, assignments, computations and
//! the evaluation function.
//!
//! The theory is fixed: integer linear arithmetic with booleans. Integers are
//! arbitrary precision; there is no overflow.

mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

pub use parse::{parse_term, term_from_surface};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
}

/// A scalar value: integer or boolean.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Cell,
    Input,
}

/// A cell or input, optionally attached to a trace variable.
///
/// Field order fixes the sort order: by name, then trace, then kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident {
    pub name: String,
    pub trace: Option<String>,
    pub kind: VarKind,
}

impl Ident {
    pub fn cell(name: impl Into<String>) -> Ident {
        Ident {
            name: name.into(),
            trace: None,
            kind: VarKind::Cell,
        }
    }

    pub fn input(name: impl Into<String>) -> Ident {
        Ident {
            name: name.into(),
            trace: None,
            kind: VarKind::Input,
        }
    }

    pub fn on_trace(&self, trace: &str) -> Ident {
        Ident {
            name: self.name.clone(),
            trace: Some(trace.to_string()),
            kind: self.kind,
        }
    }

    pub fn is_cell(&self) -> bool {
        self.kind == VarKind::Cell
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.trace {
            Some(t) => write!(f, "{}[{}]", self.name, t),
            None => f.write_str(&self.name),
        }
    }
}

/// Function symbols of the fixed theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Neg,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Neg | Op::Not => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Neg => "-",
            Op::Eq => "=",
            Op::Ne => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::And => "&&",
            Op::Or => "||",
            Op::Not => "!",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Int,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Value),
    Var(Ident),
    Apply(Op, Vec<Term>),
}

impl Term {
    pub fn int(n: i64) -> Term {
        Term::Const(Value::int(n))
    }

    pub fn bool(b: bool) -> Term {
        Term::Const(Value::Bool(b))
    }

    pub fn var(id: Ident) -> Term {
        Term::Var(id)
    }

    /// Builds an application, checking arity.
    pub fn apply(op: Op, args: Vec<Term>) -> Term {
        assert_eq!(op.arity(), args.len(), "arity mismatch for `{}`", op.symbol());
        Term::Apply(op, args)
    }

    pub fn binary(op: Op, a: Term, b: Term) -> Term {
        Term::apply(op, vec![a, b])
    }

    pub fn not(t: Term) -> Term {
        Term::apply(Op::Not, vec![t])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::binary(Op::Eq, a, b)
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction(parts: Vec<Term>) -> Term {
        let mut it = parts.into_iter();
        match it.next() {
            None => Term::bool(true),
            Some(first) => it.fold(first, |acc, t| Term::binary(Op::And, acc, t)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Const(_) => {}
            Term::Var(id) => {
                out.insert(id.clone());
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(_) => true,
            Term::Apply(_, args) => args.iter().any(Term::has_vars),
        }
    }

    /// Applies `f` to every variable occurrence.
    pub fn map_vars(&self, f: &dyn Fn(&Ident) -> Ident) -> Term {
        match self {
            Term::Const(v) => Term::Const(v.clone()),
            Term::Var(id) => Term::Var(f(id)),
            Term::Apply(op, args) => {
                Term::Apply(*op, args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    pub fn substitute(&self, f: &dyn Fn(&Ident) -> Option<Term>) -> Term {
        match self {
            Term::Const(v) => Term::Const(v.clone()),
            Term::Var(id) => f(id).unwrap_or_else(|| Term::Var(id.clone())),
            Term::Apply(op, args) => {
                Term::Apply(*op, args.iter().map(|a| a.substitute(f)).collect())
            }
        }
    }

    pub fn sort(&self) -> Result<Sort, TermError> {
        match self {
            Term::Const(Value::Int(_)) => Ok(Sort::Int),
            Term::Const(Value::Bool(_)) => Ok(Sort::Bool),
            Term::Var(_) => Ok(Sort::Int),
            Term::Apply(op, args) => {
                let sorts = args.iter().map(Term::sort).collect::<Result<Vec<_>, _>>()?;
                let want = |s: Sort| -> Result<(), TermError> {
                    if sorts.iter().all(|x| *x == s) {
                        Ok(())
                    } else {
                        Err(TermError::SortMismatch(format!(
                            "operands of `{}` must be {}",
                            op.symbol(),
                            if s == Sort::Int { "integers" } else { "booleans" }
                        )))
                    }
                };
                match op {
                    Op::Add | Op::Sub | Op::Mul | Op::Neg => want(Sort::Int).map(|_| Sort::Int),
                    Op::Lt | Op::Le | Op::Gt | Op::Ge => want(Sort::Int).map(|_| Sort::Bool),
                    Op::And | Op::Or | Op::Not => want(Sort::Bool).map(|_| Sort::Bool),
                    Op::Eq | Op::Ne => {
                        if sorts[0] == sorts[1] {
                            Ok(Sort::Bool)
                        } else {
                            Err(TermError::SortMismatch(format!(
                                "both sides of `{}` must have the same sort",
                                op.symbol()
                            )))
                        }
                    }
                }
            }
        }
    }

    /// Multiplication must have a variable-free operand.
    pub fn is_linear(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => true,
            Term::Apply(Op::Mul, args) => {
                args.iter().all(Term::is_linear) && !(args[0].has_vars() && args[1].has_vars())
            }
            Term::Apply(_, args) => args.iter().all(Term::is_linear),
        }
    }
}

/// A boolean-sorted term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateTerm(pub Term);

impl PredicateTerm {
    pub fn new(term: Term) -> Result<Self, TermError> {
        match term.sort()? {
            Sort::Bool => Ok(PredicateTerm(term)),
            Sort::Int => Err(TermError::SortMismatch(format!(
                "`{term}` is not a predicate"
            ))),
        }
    }

    pub fn term(&self) -> &Term {
        &self.0
    }
}

impl fmt::Display for PredicateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `[target <- source]`: the cell takes the value `source` had one step earlier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpdateTerm {
    pub target: Ident,
    pub source: Term,
}

impl UpdateTerm {
    pub fn new(target: Ident, source: Term) -> Result<Self, TermError> {
        if !target.is_cell() {
            return Err(TermError::SortMismatch(format!(
                "update target `{target}` is not a cell"
            )));
        }
        Ok(UpdateTerm { target, source })
    }
}

impl fmt::Display for UpdateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} <- {}]", self.target, self.source)
    }
}

/// A total map from a declared variable universe to values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: BTreeMap<Ident, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    /// Every identifier mapped to zero.
    pub fn zeros<'a>(universe: impl IntoIterator<Item = &'a Ident>) -> Self {
        Assignment {
            values: universe
                .into_iter()
                .map(|id| (id.clone(), Value::Int(BigInt::zero())))
                .collect(),
        }
    }

    pub fn with(mut self, id: Ident, value: Value) -> Self {
        self.values.insert(id, value);
        self
    }

    pub fn set(&mut self, id: Ident, value: Value) {
        self.values.insert(id, value);
    }

    pub fn get(&self, id: &Ident) -> Result<&Value, TermError> {
        self.values
            .get(id)
            .ok_or_else(|| TermError::UnboundVariable(id.to_string()))
    }

    pub fn contains(&self, id: &Ident) -> bool {
        self.values.contains_key(id)
    }

    pub fn idents(&self) -> impl Iterator<Item = &Ident> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Value)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Union of two assignments; entries of `other` win on overlap.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut values = self.values.clone();
        values.extend(other.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        Assignment { values }
    }

    pub fn restrict(&self, keep: impl Fn(&Ident) -> bool) -> Assignment {
        Assignment {
            values: self
                .values
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn map_idents(&self, f: impl Fn(&Ident) -> Ident) -> Assignment {
        Assignment {
            values: self.values.iter().map(|(k, v)| (f(k), v.clone())).collect(),
        }
    }
}

impl FromIterator<(Ident, Value)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Ident, Value)>>(iter: I) -> Self {
        Assignment {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// An ultimately periodic computation `initial, stem, loop^ω`.
///
/// Position `-1` is the initial assignment; position `t >= 0` is
/// `stem[t]` while `t < stem.len()` and the loop afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Computation {
    pub initial: Assignment,
    pub stem: Vec<Assignment>,
    pub cycle: Vec<Assignment>,
}

impl Computation {
    pub fn new(initial: Assignment, stem: Vec<Assignment>, cycle: Vec<Assignment>) -> Self {
        assert!(!cycle.is_empty(), "a computation needs a nonempty loop");
        Computation {
            initial,
            stem,
            cycle,
        }
    }

    pub fn at(&self, t: i64) -> &Assignment {
        if t < 0 {
            return &self.initial;
        }
        let t = t as usize;
        if t < self.stem.len() {
            &self.stem[t]
        } else {
            &self.cycle[(t - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Positions past this bound repeat an earlier position's future.
    pub fn horizon(&self) -> usize {
        self.stem.len() + 2 * self.cycle.len()
    }

    /// Maps a position to its canonical representative in `0..stem+loop`.
    pub fn canonical(&self, t: usize) -> usize {
        if t < self.stem.len() {
            t
        } else {
            self.stem.len() + (t - self.stem.len()) % self.cycle.len()
        }
    }
}

fn int_arg(v: Value, op: Op) -> Result<BigInt, TermError> {
    match v {
        Value::Int(n) => Ok(n),
        Value::Bool(_) => Err(TermError::SortMismatch(format!(
            "`{}` expects integer operands",
            op.symbol()
        ))),
    }
}

fn bool_arg(v: Value, op: Op) -> Result<bool, TermError> {
    match v {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(TermError::SortMismatch(format!(
            "`{}` expects boolean operands",
            op.symbol()
        ))),
    }
}

/// The evaluation function η.
pub fn evaluate(term: &Term, a: &Assignment) -> Result<Value, TermError> {
    match term {
        Term::Const(v) => Ok(v.clone()),
        Term::Var(id) => a.get(id).cloned(),
        Term::Apply(op, args) => {
            let vals = args
                .iter()
                .map(|t| evaluate(t, a))
                .collect::<Result<Vec<_>, _>>()?;
            apply_op(*op, vals)
        }
    }
}

fn apply_op(op: Op, mut vals: Vec<Value>) -> Result<Value, TermError> {
    let second = if vals.len() > 1 { vals.pop() } else { None };
    let first = vals.pop().expect("operator without operands");
    Ok(match op {
        Op::Neg => Value::Int(-int_arg(first, op)?),
        Op::Not => Value::Bool(!bool_arg(first, op)?),
        Op::Add | Op::Sub | Op::Mul | Op::Lt | Op::Le | Op::Gt | Op::Ge => {
            let x = int_arg(first, op)?;
            let y = int_arg(second.expect("binary operator"), op)?;
            match op {
                Op::Add => Value::Int(x + y),
                Op::Sub => Value::Int(x - y),
                Op::Mul => Value::Int(x * y),
                Op::Lt => Value::Bool(x < y),
                Op::Le => Value::Bool(x <= y),
                Op::Gt => Value::Bool(x > y),
                _ => Value::Bool(x >= y),
            }
        }
        Op::And | Op::Or => {
            let x = bool_arg(first, op)?;
            let y = bool_arg(second.expect("binary operator"), op)?;
            Value::Bool(if op == Op::And { x && y } else { x || y })
        }
        Op::Eq | Op::Ne => {
            let y = second.expect("binary operator");
            let same_sort = matches!(
                (&first, &y),
                (Value::Int(_), Value::Int(_)) | (Value::Bool(_), Value::Bool(_))
            );
            if !same_sort {
                return Err(TermError::SortMismatch(format!(
                    "`{}` compares an integer with a boolean",
                    op.symbol()
                )));
            }
            Value::Bool((first == y) == (op == Op::Eq))
        }
    })
}

/// Evaluates a predicate term to a boolean.
pub fn holds(pred: &PredicateTerm, a: &Assignment) -> Result<bool, TermError> {
    match evaluate(&pred.0, a)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(TermError::SortMismatch(format!("`{pred}` is not a predicate"))),
    }
}

/// Whether `cur(target) = η(source, prev)`.
pub fn update_holds(u: &UpdateTerm, prev: &Assignment, cur: &Assignment) -> Result<bool, TermError> {
    let expected = evaluate(&u.source, prev)?;
    Ok(*cur.get(&u.target)? == expected)
}
