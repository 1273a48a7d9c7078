use std::collections::BTreeSet;

use crate::surface::{parse_expr, BinOp, Mode, Surface, SurfaceKind, UnOp};
use crate::syntax::{tokenize, Cursor, ParseError, Tok};
use crate::terms::{term_from_surface, Ident, PredicateTerm, UpdateTerm, VarKind};

use super::{Formula, FormulaError, Quantifier, Temporal, TemporalFormula, TslAtom};

/// Parses `forall pi. exists pi2. <temporal formula>`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(tokens.clone());
    let mut prefix = Vec::new();
    loop {
        let q = if cur.is_keyword("forall") {
            Quantifier::Forall
        } else if cur.is_keyword("exists") {
            Quantifier::Exists
        } else {
            break;
        };
        cur.bump();
        let var = cur.expect_ident()?;
        cur.expect(&Tok::Dot)?;
        if prefix.iter().any(|(_, t)| *t == var) {
            return Err(FormulaError::DuplicateTrace(var));
        }
        prefix.push((q, var));
    }
    // Any quantifier keyword past the prefix sits under an operator.
    if let Some(t) = tokens.iter().skip_while(|t| t.pos != cur.pos()).find(|t| {
        matches!(&t.tok, Tok::Ident(s) if s == "forall" || s == "exists")
    }) {
        return Err(FormulaError::NonPrenex {
            line: t.pos.line,
            column: t.pos.column,
        });
    }
    let surface = parse_expr(&mut cur, Mode { temporal: true })?;
    cur.expect_eof()?;
    let core = temporal_from_surface(&surface)?;

    let bound: BTreeSet<&String> = prefix.iter().map(|(_, t)| t).collect();
    let mut unbound = None;
    let mut unindexed = false;
    core.for_each_atom(&mut |a| {
        for id in atom_vars(a) {
            match &id.trace {
                Some(t) if !bound.contains(t) => unbound = Some(t.clone()),
                None => unindexed = true,
                _ => {}
            }
        }
    });
    if let Some(t) = unbound {
        return Err(FormulaError::UnboundTrace(t));
    }
    if unindexed && !prefix.is_empty() {
        return Err(FormulaError::Parse(ParseError::new(
            surface.pos,
            "variables of a quantified formula need a trace index",
        )));
    }
    Ok(Formula { prefix, core })
}

fn atom_vars(a: &TslAtom) -> BTreeSet<Ident> {
    match a {
        TslAtom::Pred(p) => p.term().vars(),
        TslAtom::Upd(u) => {
            let mut v = u.source.vars();
            v.insert(u.target.clone());
            v
        }
    }
}

fn temporal_from_surface(s: &Surface) -> Result<TemporalFormula, ParseError> {
    if !s.is_temporal() {
        return match &s.kind {
            SurfaceKind::Bool(b) => Ok(Temporal::Const(*b)),
            _ => {
                let term = term_from_surface(s)?;
                let pred = PredicateTerm::new(term)
                    .map_err(|e| ParseError::new(s.pos, e.to_string()))?;
                Ok(Temporal::Atom(TslAtom::Pred(pred)))
            }
        };
    }
    let sub = temporal_from_surface;
    Ok(match &s.kind {
        SurfaceKind::Update {
            target,
            trace,
            source,
        } => {
            let target = Ident {
                name: target.clone(),
                trace: trace.clone(),
                kind: VarKind::Cell,
            };
            let source = term_from_surface(source)?;
            source
                .sort()
                .map_err(|e| ParseError::new(s.pos, e.to_string()))?;
            let upd = UpdateTerm::new(target, source)
                .map_err(|e| ParseError::new(s.pos, e.to_string()))?;
            Temporal::Atom(TslAtom::Upd(upd))
        }
        SurfaceKind::Unary(UnOp::Not, a) => Temporal::not(sub(a)?),
        SurfaceKind::Unary(UnOp::Next, a) => Temporal::next(sub(a)?),
        SurfaceKind::Unary(UnOp::Eventually, a) => Temporal::eventually(sub(a)?),
        SurfaceKind::Unary(UnOp::Globally, a) => Temporal::globally(sub(a)?),
        SurfaceKind::Binary(BinOp::And, a, b) => Temporal::and(sub(a)?, sub(b)?),
        SurfaceKind::Binary(BinOp::Or, a, b) => Temporal::or(sub(a)?, sub(b)?),
        SurfaceKind::Binary(BinOp::Until, a, b) => Temporal::until(sub(a)?, sub(b)?),
        _ => {
            return Err(ParseError::new(
                s.pos,
                "temporal operators and update terms cannot appear inside a term",
            ))
        }
    })
}
