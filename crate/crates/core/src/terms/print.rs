//! Printer for terms. The output re-parses to the same tree.

use std::fmt;

use super::{Op, Term, Value};

fn prec(op: Op) -> u8 {
    match op {
        Op::Or => 1,
        Op::And => 2,
        Op::Eq | Op::Ne | Op::Lt | Op::Le | Op::Gt | Op::Ge => 4,
        Op::Add | Op::Sub => 5,
        Op::Mul => 6,
        Op::Neg | Op::Not => 7,
    }
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Apply(op, _) => prec(*op),
        _ => 8,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if term_prec(t) < min {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(Value::Int(n)) => write!(f, "{n}"),
            Term::Const(Value::Bool(b)) => write!(f, "{b}"),
            Term::Var(id) => write!(f, "{id}"),
            Term::Apply(Op::Neg, args) => match &args[0] {
                // `-5` would read back as a literal
                Term::Var(id) => write!(f, "-{id}"),
                inner => write!(f, "-({inner})"),
            },
            Term::Apply(Op::Not, args) => {
                f.write_str("!")?;
                write_child(f, &args[0], 7)
            }
            Term::Apply(op, args) => {
                let p = prec(*op);
                let (left_min, right_min) = match op {
                    Op::Eq | Op::Ne | Op::Lt | Op::Le | Op::Gt | Op::Ge => (p + 1, p + 1),
                    _ => (p, p + 1),
                };
                write_child(f, &args[0], left_min)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, &args[1], right_min)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_term, Ident, Term};
    use super::*;

    #[test]
    fn minimal_parentheses() {
        for text in ["n + 7", "a - (b - c)", "a - b - c", "!(a = b)", "(a || b) && c = 1"] {
            let text = text.replace("a ||", "x = 1 ||").replace("|| b)", "|| y = 2)");
            let t = parse_term(&text).unwrap();
            assert_eq!(parse_term(&t.to_string()).unwrap(), t, "{text}");
        }
        let t = parse_term("a - (b - c)").unwrap();
        assert_eq!(t.to_string(), "a - (b - c)");
    }

    #[test]
    fn negation_versus_literal() {
        let lit = parse_term("-5").unwrap();
        let neg = Term::apply(Op::Neg, vec![Term::int(5)]);
        assert_ne!(lit, neg);
        assert_eq!(lit.to_string(), "-5");
        assert_eq!(neg.to_string(), "-(5)");
        assert_eq!(parse_term(&neg.to_string()).unwrap(), neg);
        let t = Term::binary(Op::Sub, Term::var(Ident::cell("a")), Term::int(-5));
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}
