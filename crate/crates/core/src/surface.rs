//! Surface syntax shared by terms and temporal formulas.
//!
//! One precedence-climbing parser produces a [`Surface`] tree that may mix
//! term-level operators with temporal ones. [`crate::terms::parse_term`]
//! accepts only the pure-term fragment; [`crate::logic::parse_formula`]
//! splits a mixed tree into temporal structure and predicate atoms.
//!
//! Binding strength, loosest first: `||`, `&&`, `U` (right associative),
//! comparisons (non-associative), `+ -`, `*`, then the prefix operators
//! `! - X F G`.

use num_bigint::BigInt;

use crate::syntax::{Cursor, ParseError, Pos, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    Next,
    Eventually,
    Globally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Until,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceKind {
    Int(BigInt),
    Bool(bool),
    Var {
        name: String,
        trace: Option<String>,
    },
    Unary(UnOp, Box<Surface>),
    Binary(BinOp, Box<Surface>, Box<Surface>),
    Update {
        target: String,
        trace: Option<String>,
        source: Box<Surface>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub pos: Pos,
}

impl Surface {
    /// True when the tree contains a temporal operator or an update term.
    pub fn is_temporal(&self) -> bool {
        match &self.kind {
            SurfaceKind::Int(_) | SurfaceKind::Bool(_) | SurfaceKind::Var { .. } => false,
            SurfaceKind::Update { .. } => true,
            SurfaceKind::Unary(op, inner) => {
                matches!(op, UnOp::Next | UnOp::Eventually | UnOp::Globally) || inner.is_temporal()
            }
            SurfaceKind::Binary(op, l, r) => {
                *op == BinOp::Until || l.is_temporal() || r.is_temporal()
            }
        }
    }
}

/// Parser configuration: whether `X F G U` and update terms are operators.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub temporal: bool,
}

pub fn parse_expr(cur: &mut Cursor, mode: Mode) -> Result<Surface, ParseError> {
    parse_level(cur, mode, 0)
}

fn infix(cur: &Cursor, mode: Mode) -> Option<(BinOp, u8, Assoc)> {
    let op = match cur.peek() {
        Tok::OrOr => (BinOp::Or, 1, Assoc::Left),
        Tok::AndAnd => (BinOp::And, 2, Assoc::Left),
        Tok::Ident(s) if mode.temporal && s == "U" => (BinOp::Until, 3, Assoc::Right),
        Tok::Eq => (BinOp::Eq, 4, Assoc::None),
        Tok::Ne => (BinOp::Ne, 4, Assoc::None),
        Tok::Lt => (BinOp::Lt, 4, Assoc::None),
        Tok::Le => (BinOp::Le, 4, Assoc::None),
        Tok::Gt => (BinOp::Gt, 4, Assoc::None),
        Tok::Ge => (BinOp::Ge, 4, Assoc::None),
        Tok::Plus => (BinOp::Add, 5, Assoc::Left),
        Tok::Minus => (BinOp::Sub, 5, Assoc::Left),
        Tok::Star => (BinOp::Mul, 6, Assoc::Left),
        _ => return None,
    };
    Some(op)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
    None,
}

fn parse_level(cur: &mut Cursor, mode: Mode, min: u8) -> Result<Surface, ParseError> {
    let mut lhs = parse_prefix(cur, mode)?;
    let mut last_nonassoc: Option<u8> = None;
    while let Some((op, prec, assoc)) = infix(cur, mode) {
        if prec < min {
            break;
        }
        if assoc == Assoc::None && last_nonassoc == Some(prec) {
            return Err(cur.error("comparison operators cannot be chained"));
        }
        let pos = cur.pos();
        cur.bump();
        let next_min = match assoc {
            Assoc::Left | Assoc::None => prec + 1,
            Assoc::Right => prec,
        };
        let rhs = parse_level(cur, mode, next_min)?;
        lhs = Surface {
            kind: SurfaceKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            pos,
        };
        last_nonassoc = if assoc == Assoc::None { Some(prec) } else { None };
    }
    Ok(lhs)
}

fn parse_prefix(cur: &mut Cursor, mode: Mode) -> Result<Surface, ParseError> {
    let pos = cur.pos();
    let unary = match cur.peek() {
        Tok::Bang => Some(UnOp::Not),
        Tok::Minus => {
            // `-5` is a literal; `-(5)` and `-x` are negations.
            if let Tok::Int(n) = cur.peek_at(1).clone() {
                cur.bump();
                cur.bump();
                return Ok(Surface {
                    kind: SurfaceKind::Int(-n),
                    pos,
                });
            }
            Some(UnOp::Neg)
        }
        Tok::Ident(s) if mode.temporal => match s.as_str() {
            "X" => Some(UnOp::Next),
            "F" => Some(UnOp::Eventually),
            "G" => Some(UnOp::Globally),
            _ => None,
        },
        _ => None,
    };
    if let Some(op) = unary {
        cur.bump();
        let inner = parse_prefix(cur, mode)?;
        return Ok(Surface {
            kind: SurfaceKind::Unary(op, Box::new(inner)),
            pos,
        });
    }
    parse_primary(cur, mode)
}

fn parse_primary(cur: &mut Cursor, mode: Mode) -> Result<Surface, ParseError> {
    let pos = cur.pos();
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Surface {
                kind: SurfaceKind::Int(n),
                pos,
            })
        }
        Tok::LParen => {
            cur.bump();
            let e = parse_level(cur, mode, 0)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::LBracket => {
            if !mode.temporal {
                return Err(cur.error("update terms are only allowed in formulas"));
            }
            cur.bump();
            let (target, trace) = parse_var_name(cur)?;
            cur.expect(&Tok::LArrow)?;
            let source = parse_level(cur, Mode { temporal: false }, 0)?;
            cur.expect(&Tok::RBracket)?;
            Ok(Surface {
                kind: SurfaceKind::Update {
                    target,
                    trace,
                    source: Box::new(source),
                },
                pos,
            })
        }
        Tok::Ident(word) => match word.as_str() {
            "true" | "false" => {
                cur.bump();
                Ok(Surface {
                    kind: SurfaceKind::Bool(word == "true"),
                    pos,
                })
            }
            _ if is_reserved(&word, mode) => {
                Err(cur.error(format!("`{word}` is a reserved word here")))
            }
            _ => {
                let (name, trace) = parse_var_name(cur)?;
                Ok(Surface {
                    kind: SurfaceKind::Var { name, trace },
                    pos,
                })
            }
        },
        other => Err(cur.error(format!("expected an expression, found {other}"))),
    }
}

fn is_reserved(word: &str, mode: Mode) -> bool {
    matches!(word, "forall" | "exists" | "assert")
        || (mode.temporal && matches!(word, "X" | "F" | "G" | "U"))
}

/// Parses `name` or `name[trace]`.
pub fn parse_var_name(cur: &mut Cursor) -> Result<(String, Option<String>), ParseError> {
    let name = cur.expect_ident()?;
    if *cur.peek() == Tok::LBracket && matches!(cur.peek_at(1), Tok::Ident(_)) {
        if let Tok::RBracket = cur.peek_at(2) {
            cur.bump();
            let trace = cur.expect_ident()?;
            cur.expect(&Tok::RBracket)?;
            return Ok((name, Some(trace)));
        }
    }
    Ok((name, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::tokenize;

    fn parse(text: &str, temporal: bool) -> Surface {
        let mut cur = Cursor::new(tokenize(text).unwrap());
        let e = parse_expr(&mut cur, Mode { temporal }).unwrap();
        cur.expect_eof().unwrap();
        e
    }

    #[test]
    fn until_binds_looser_than_comparison() {
        let e = parse("a = 0 U b = 1", true);
        assert!(matches!(e.kind, SurfaceKind::Binary(BinOp::Until, _, _)));
    }

    #[test]
    fn temporal_words_are_identifiers_in_term_mode() {
        let e = parse("X + F", false);
        assert!(matches!(e.kind, SurfaceKind::Binary(BinOp::Add, _, _)));
        assert!(!e.is_temporal());
    }

    #[test]
    fn chained_comparison_is_rejected() {
        let mut cur = Cursor::new(tokenize("a < b < c").unwrap());
        assert!(parse_expr(&mut cur, Mode { temporal: false }).is_err());
    }

    #[test]
    fn update_term_with_trace() {
        let e = parse("[c[pi] <- c[pi] + 1]", true);
        match e.kind {
            SurfaceKind::Update { target, trace, .. } => {
                assert_eq!(target, "c");
                assert_eq!(trace.as_deref(), Some("pi"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
