//! LTL over indexed atoms: letters, lasso semantics and translation to
//! Büchi automata.

mod translate;

use std::fmt;

use crate::logic::Temporal;

pub use translate::translate;

/// LTL formula whose atoms are indices into an atom set.
pub type Ltl = Temporal<usize>;

/// A total valuation of up to 64 atoms: atom `i` is true iff bit `i` is set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub u64);

impl Valuation {
    pub fn get(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn with(mut self, i: usize, value: bool) -> Self {
        if value {
            self.set(i);
        } else {
            self.0 &= !(1 << i);
        }
        self
    }

    /// All valuations of `n` atoms, in increasing bit order.
    pub fn all(n: usize) -> Vec<Valuation> {
        assert!(n < 64, "too many atoms");
        (0..1u64 << n).map(Valuation).collect()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for i in 0..64 {
            if self.get(i) {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "a{i}")?;
            }
        }
        f.write_str("}")
    }
}

/// Truth of `f` at every position of the lasso `stem · cycle^ω`, where
/// positions past the stem are folded into the cycle.
///
/// Subformulas are evaluated bottom-up on the finite position graph; `U` is
/// the least fixpoint of `b ∨ (a ∧ X(a U b))`.
pub fn eval_positions(f: &Ltl, stem: &[Valuation], cycle: &[Valuation]) -> Vec<bool> {
    assert!(!cycle.is_empty(), "lasso needs a nonempty loop");
    let word: Vec<Valuation> = stem.iter().chain(cycle).copied().collect();
    let n = word.len();
    let next = |p: usize| if p + 1 == n { stem.len() } else { p + 1 };
    fn go(f: &Ltl, word: &[Valuation], next: &dyn Fn(usize) -> usize) -> Vec<bool> {
        let n = word.len();
        match f {
            Temporal::Const(b) => vec![*b; n],
            Temporal::Atom(i) => word.iter().map(|v| v.get(*i)).collect(),
            Temporal::Not(a) => go(a, word, next).into_iter().map(|x| !x).collect(),
            Temporal::And(a, b) => {
                let (a, b) = (go(a, word, next), go(b, word, next));
                (0..n).map(|p| a[p] && b[p]).collect()
            }
            Temporal::Next(a) => {
                let a = go(a, word, next);
                (0..n).map(|p| a[next(p)]).collect()
            }
            Temporal::Until(a, b) => {
                let (a, b) = (go(a, word, next), go(b, word, next));
                let mut val = b.clone();
                loop {
                    let mut changed = false;
                    for p in (0..n).rev() {
                        if !val[p] && a[p] && val[next(p)] {
                            val[p] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        return val;
                    }
                }
            }
        }
    }
    go(f, &word, &next)
}

/// Truth of `f` at position `t` of `stem · cycle^ω`.
pub fn eval_ltl(f: &Ltl, stem: &[Valuation], cycle: &[Valuation], t: usize) -> bool {
    let pos = if t < stem.len() {
        t
    } else {
        stem.len() + (t - stem.len()) % cycle.len()
    };
    eval_positions(f, stem, cycle)[pos]
}
