use crate::surface::{parse_expr, BinOp, Mode, Surface, SurfaceKind, UnOp};
use crate::syntax::{tokenize, Cursor, ParseError};

use super::{Ident, Op, Term, Value, VarKind};

/// Parses a pure function term. Variables are tagged as cells; callers that
/// know the declared inputs re-tag them.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let surface = parse_expr(&mut cur, Mode { temporal: false })?;
    cur.expect_eof()?;
    let term = term_from_surface(&surface)?;
    term.sort()
        .map_err(|e| ParseError::new(surface.pos, e.to_string()))?;
    Ok(term)
}

/// Converts a temporal-operator-free surface tree into a term.
pub fn term_from_surface(s: &Surface) -> Result<Term, ParseError> {
    let t = match &s.kind {
        SurfaceKind::Int(n) => Term::Const(Value::Int(n.clone())),
        SurfaceKind::Bool(b) => Term::Const(Value::Bool(*b)),
        SurfaceKind::Var { name, trace } => Term::Var(Ident {
            name: name.clone(),
            trace: trace.clone(),
            kind: VarKind::Cell,
        }),
        SurfaceKind::Unary(op, inner) => {
            let op = match op {
                UnOp::Neg => Op::Neg,
                UnOp::Not => Op::Not,
                _ => return Err(ParseError::new(s.pos, "temporal operator inside a term")),
            };
            Term::Apply(op, vec![term_from_surface(inner)?])
        }
        SurfaceKind::Binary(op, l, r) => {
            let op = match op {
                BinOp::Add => Op::Add,
                BinOp::Sub => Op::Sub,
                BinOp::Mul => Op::Mul,
                BinOp::Eq => Op::Eq,
                BinOp::Ne => Op::Ne,
                BinOp::Lt => Op::Lt,
                BinOp::Le => Op::Le,
                BinOp::Gt => Op::Gt,
                BinOp::Ge => Op::Ge,
                BinOp::And => Op::And,
                BinOp::Or => Op::Or,
                BinOp::Until => {
                    return Err(ParseError::new(s.pos, "temporal operator inside a term"))
                }
            };
            let (a, b) = (term_from_surface(l)?, term_from_surface(r)?);
            if op == Op::Mul && a.has_vars() && b.has_vars() {
                return Err(ParseError::new(
                    s.pos,
                    "non-linear multiplication: one factor must be constant",
                ));
            }
            Term::Apply(op, vec![a, b])
        }
        SurfaceKind::Update { .. } => {
            return Err(ParseError::new(s.pos, "update term inside a function term"))
        }
    };
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let t = parse_term("n + 7").unwrap();
        assert_eq!(
            t,
            Term::binary(Op::Add, Term::var(Ident::cell("n")), Term::int(7))
        );
        let t = parse_term("a = 1 || b = 2 && !c").unwrap_err();
        // `!c` on an integer variable is ill-sorted
        assert!(t.message.contains("boolean"));
        let t = parse_term("1 + 2 * 3 < 4").unwrap();
        match t {
            Term::Apply(Op::Lt, args) => match &args[0] {
                Term::Apply(Op::Add, inner) => {
                    assert!(matches!(inner[1], Term::Apply(Op::Mul, _)))
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hyper_predicate() {
        let t = parse_term("i[pi2] = 0 && c[pi] = c[pi2]").unwrap();
        let vars: Vec<String> = t.vars().iter().map(|v| v.to_string()).collect();
        assert_eq!(vars, ["c[pi]", "c[pi2]", "i[pi2]"]);
        assert!(matches!(t, Term::Apply(Op::And, _)));
    }

    #[test]
    fn comparison_with_literal() {
        let t = parse_term("n >= 0").unwrap();
        assert_eq!(
            t,
            Term::binary(Op::Ge, Term::var(Ident::cell("n")), Term::int(0))
        );
    }

    #[test]
    fn rejects_nonlinear_and_temporal() {
        assert!(parse_term("x * y").is_err());
        assert!(parse_term("3 * y").is_ok());
        assert!(parse_term("X a").is_err());
        assert!(parse_term("[c <- 1]").is_err());
    }

    #[test]
    fn error_location() {
        let e = parse_term("n +").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
    }
}
