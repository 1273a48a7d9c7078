//! The line-oriented program automaton format.
//!
//! ```text
//! cells: n, p
//! inputs: i
//! init: n=0, p=0
//! state q0 initial accepting
//! trans q0 -> q1 : assert(i < 0)
//! trans q1 -> q0 : c := 0; n--
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::buchi::BuchiAutomaton;
use crate::surface::{parse_expr, Mode};
use crate::syntax::{tokenize, tokenize_at, Cursor, ParseError, Pos, Tok};
use crate::terms::{term_from_surface, Assignment, Ident, Op, PredicateTerm, Sort, Term, Value, VarKind};

use super::{ProgramAutomaton, ProgramError, Statement, Universe};

fn retag(t: &Term, inputs: &BTreeSet<Ident>) -> Term {
    t.map_vars(&|id| {
        let as_input = Ident {
            kind: VarKind::Input,
            ..id.clone()
        };
        if inputs.contains(&as_input) {
            as_input
        } else {
            id.clone()
        }
    })
}

fn parse_term_at(cur: &mut Cursor, inputs: &BTreeSet<Ident>) -> Result<Term, ParseError> {
    let pos = cur.pos();
    let surface = parse_expr(cur, Mode { temporal: false })?;
    let t = retag(&term_from_surface(&surface)?, inputs);
    t.sort().map_err(|e| ParseError::new(pos, e.to_string()))?;
    Ok(t)
}

fn parse_basic(cur: &mut Cursor, inputs: &BTreeSet<Ident>) -> Result<Statement, ParseError> {
    let pos = cur.pos();
    if cur.is_keyword("assert") && *cur.peek_at(1) == Tok::LParen {
        cur.bump();
        cur.bump();
        let t = parse_term_at(cur, inputs)?;
        cur.expect(&Tok::RParen)?;
        return PredicateTerm::new(t)
            .map(Statement::Assert)
            .map_err(|_| ParseError::new(pos, "assertion must be boolean"));
    }
    let name = cur.expect_ident()?;
    let target = retag(&Term::var(Ident::cell(name)), inputs);
    let Term::Var(target) = target else { unreachable!() };
    let one = || Term::int(1);
    let v = Term::var(target.clone());
    match cur.peek().clone() {
        Tok::Decr => {
            cur.bump();
            Ok(Statement::Assign(target, Term::binary(Op::Sub, v, one())))
        }
        Tok::Incr => {
            cur.bump();
            Ok(Statement::Assign(target, Term::binary(Op::Add, v, one())))
        }
        Tok::Assign => {
            cur.bump();
            if *cur.peek() == Tok::Star {
                cur.bump();
                return Ok(Statement::Havoc(target));
            }
            let tpos = cur.pos();
            let t = parse_term_at(cur, inputs)?;
            if t.sort() != Ok(Sort::Int) {
                return Err(ParseError::new(tpos, "assigned value must be an integer"));
            }
            Ok(Statement::Assign(target, t))
        }
        other => Err(cur.error(format!("expected `:=`, `--` or `++`, found {other}"))),
    }
}

fn parse_seq(cur: &mut Cursor, inputs: &BTreeSet<Ident>) -> Result<Statement, ParseError> {
    let mut parts = vec![parse_basic(cur, inputs)?];
    while cur.eat(&Tok::Semi) {
        parts.push(parse_basic(cur, inputs)?);
    }
    Ok(Statement::sequence(parts))
}

/// Parses `s1; s2; ...`. Variables named like a member of `inputs` are
/// tagged as inputs, all others as cells.
pub fn parse_statement(text: &str, inputs: &BTreeSet<Ident>) -> Result<Statement, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let s = parse_seq(&mut cur, inputs)?;
    cur.expect_eof()?;
    Ok(s)
}

fn invalid(line: usize, msg: impl Into<String>) -> ProgramError {
    ProgramError::Validation(format!("line {line}: {}", msg.into()))
}

fn ident_list(cur: &mut Cursor) -> Result<Vec<(String, Pos)>, ParseError> {
    let mut out = Vec::new();
    if *cur.peek() == Tok::Eof {
        return Ok(out);
    }
    loop {
        let pos = cur.pos();
        out.push((cur.expect_ident()?, pos));
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect_eof()?;
    Ok(out)
}

/// Parses and validates a system-mode program automaton: every state is
/// accepting, exactly one state is initial, every identifier is declared
/// and only cells are assigned.
pub fn parse_program_automaton(text: &str) -> Result<ProgramAutomaton, ProgramError> {
    let mut cells: Vec<Ident> = Vec::new();
    let mut inputs: BTreeSet<Ident> = BTreeSet::new();
    let mut init_values = Vec::new();
    let mut states: Vec<(String, bool, bool, usize)> = Vec::new();
    let mut trans: Vec<(String, String, usize, String, Pos)> = Vec::new();
    let mut declared = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let key = head.trim_end_matches(':');
        let offset = raw.find(content).unwrap_or(0);
        let rest_col = offset + head.len() + 1 + (rest.len() - rest.trim_start().len());
        let at = Pos {
            line,
            column: rest_col + 1,
        };
        let mut cur = Cursor::new(tokenize_at(rest.trim_start(), at)?);
        match key {
            "cells" | "inputs" => {
                for (name, pos) in ident_list(&mut cur)? {
                    if declared.insert(name.clone(), key).is_some() {
                        return Err(ParseError::new(pos, format!("`{name}` declared twice")).into());
                    }
                    if name.starts_with("__tmp") {
                        return Err(ParseError::new(pos, "names starting with `__tmp` are reserved").into());
                    }
                    if key == "cells" {
                        cells.push(Ident::cell(name));
                    } else {
                        inputs.insert(Ident::input(name));
                    }
                }
            }
            "init" => loop {
                let name = cur.expect_ident()?;
                cur.expect(&Tok::Eq)?;
                let neg = cur.eat(&Tok::Minus);
                let value = match cur.bump().tok {
                    Tok::Int(n) => n,
                    other => return Err(cur.error(format!("expected integer, found {other}")).into()),
                };
                let value = if neg { -value } else { value };
                init_values.push((name, value, line));
                if !cur.eat(&Tok::Comma) {
                    cur.expect_eof()?;
                    break;
                }
            },
            "state" => {
                let name = cur.expect_ident()?;
                let (mut initial, mut accepting) = (false, false);
                while let Tok::Ident(flag) = cur.peek().clone() {
                    match flag.as_str() {
                        "initial" => initial = true,
                        "accepting" => accepting = true,
                        _ => return Err(cur.error(format!("unknown state flag `{flag}`")).into()),
                    }
                    cur.bump();
                }
                cur.expect_eof()?;
                if states.iter().any(|s| s.0 == name) {
                    return Err(invalid(line, format!("state `{name}` declared twice")));
                }
                states.push((name, initial, accepting, line));
            }
            "trans" => {
                let from = cur.expect_ident()?;
                cur.expect(&Tok::Arrow)?;
                let to = cur.expect_ident()?;
                let colon = cur.pos();
                cur.expect(&Tok::Colon)?;
                // the statement text starts after the first `:` following `->`
                let after_arrow = &rest[rest.find("->").unwrap_or(0)..];
                let stmt_text = &after_arrow[after_arrow.find(':').map_or(0, |i| i + 1)..];
                let pos = Pos {
                    line,
                    column: colon.column + 1,
                };
                trans.push((from, to, line, stmt_text.to_string(), pos));
            }
            other => {
                return Err(ParseError::new(
                    Pos {
                        line,
                        column: offset + 1,
                    },
                    format!("unknown directive `{other}`"),
                )
                .into())
            }
        }
    }

    if states.is_empty() {
        return Err(ProgramError::Validation("no states declared".into()));
    }
    let initials: Vec<_> = states.iter().filter(|s| s.1).collect();
    if initials.len() != 1 {
        return Err(ProgramError::Validation(format!(
            "expected exactly one initial state, found {}",
            initials.len()
        )));
    }
    if let Some(s) = states.iter().find(|s| !s.2) {
        return Err(invalid(
            s.3,
            format!("state `{}` is not accepting; system models accept everywhere", s.0),
        ));
    }

    let universe_ids: BTreeSet<Ident> = cells.iter().cloned().chain(inputs.iter().cloned()).collect();
    let mut initial = Assignment::zeros(&universe_ids);
    for (name, value, line) in init_values {
        let id = universe_ids
            .iter()
            .find(|id| id.name == name)
            .ok_or_else(|| invalid(line, format!("`{name}` is not declared")))?;
        initial.set(id.clone(), Value::Int(value));
    }

    let init_name = &initials[0].0;
    let mut automaton = BuchiAutomaton::new(init_name.clone(), true);
    let mut index = BTreeMap::from([(init_name.clone(), 0)]);
    for s in &states {
        if &s.0 != init_name {
            index.insert(s.0.clone(), automaton.add_state(s.0.clone(), true));
        }
    }
    for (from, to, line, stmt_text, pos) in trans {
        let (Some(&p), Some(&q)) = (index.get(&from), index.get(&to)) else {
            return Err(invalid(line, format!("unknown state in `{from} -> {to}`")));
        };
        let mut cur = Cursor::new(tokenize_at(stmt_text.trim_start(), pos)?);
        let s = parse_seq(&mut cur, &inputs)?;
        cur.expect_eof()?;
        for id in s.idents() {
            if !universe_ids.contains(&id) {
                return Err(invalid(line, format!("`{id}` is not declared")));
            }
        }
        for id in s.writes() {
            if !id.is_cell() {
                return Err(invalid(line, format!("input `{id}` cannot be assigned")));
            }
        }
        automaton.add_transition(p, s, q, ());
    }

    let universe = Universe {
        framed: cells.into_iter().collect(),
        inputs,
        initial,
    };
    Ok(ProgramAutomaton::new(automaton, universe))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GNI: &str = "\
cells: c
inputs: i
state q0 initial accepting
state q1 accepting
state q2 accepting
trans q0 -> q1 : assert(i < 0)
trans q1 -> q0 : c := 0
trans q0 -> q2 : assert(i >= 0)
trans q2 -> q0 : c := 1
";

    #[test]
    fn parses_gni() {
        let p = parse_program_automaton(GNI).unwrap();
        assert_eq!(p.automaton.num_states(), 3);
        assert_eq!(p.automaton.transitions().len(), 4);
        assert_eq!(p.automaton.transitions()[0].label.to_string(), "assert(i < 0)");
        let reads = p.automaton.transitions()[0].label.reads();
        assert!(reads.iter().all(|id| id.kind == VarKind::Input));
    }

    #[test]
    fn rejects_undeclared() {
        let e = parse_program_automaton("cells: c\nstate q0 initial accepting\ntrans q0 -> q0 : c := d\n");
        assert!(matches!(e, Err(ProgramError::Validation(m)) if m.contains("`d`")));
    }

    #[test]
    fn rejects_non_accepting() {
        let e = parse_program_automaton("cells: c\nstate q0 initial\n");
        assert!(matches!(e, Err(ProgramError::Validation(_))));
    }

    #[test]
    fn rejects_input_assignment() {
        let e = parse_program_automaton("inputs: i\nstate q0 initial accepting\ntrans q0 -> q0 : i := 1\n");
        assert!(matches!(e, Err(ProgramError::Validation(m)) if m.contains("input")));
    }

    #[test]
    fn init_and_sugar() {
        let p = parse_program_automaton(
            "cells: n\ninit: n=-4\nstate a initial accepting\ntrans a -> a : n--; assert(n >= 0)\n",
        )
        .unwrap();
        assert_eq!(p.universe.initial.get(&Ident::cell("n")).unwrap(), &Value::int(-4));
        assert_eq!(
            p.automaton.transitions()[0].label.to_string(),
            "n := n - 1; assert(n >= 0)"
        );
    }

    #[test]
    fn parse_errors_have_positions() {
        let e = parse_program_automaton("cells: c\nstate q0 initial accepting\ntrans q0 -> q0 : c := (1\n")
            .unwrap_err();
        let ProgramError::Parse(p) = e else { panic!("{e:?}") };
        assert_eq!(p.line, 3);
    }
}
