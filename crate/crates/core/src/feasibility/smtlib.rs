//! External solvers speaking SMT-LIB v2 over stdin/stdout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use num_bigint::BigInt;

use crate::terms::{Assignment, Ident, Op, Term, Value};

use super::smt::{Query, Solver, SolverResult};

/// Runs one solver process per query. The command is split on whitespace;
/// the script is written to the child's stdin, which is then closed.
#[derive(Debug, Clone)]
pub struct SmtLibSolver {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl SmtLibSolver {
    pub fn new(command: &str, timeout: Duration) -> Self {
        SmtLibSolver {
            command: command.split_whitespace().map(String::from).collect(),
            timeout,
        }
    }

    fn run(&self, script: &str) -> Result<String, String> {
        let (prog, args) = self.command.split_first().ok_or("empty solver command")?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot start `{prog}`: {e}"))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut out = String::new();
            let r = stdout.read_to_string(&mut out).map(|_| out);
            let _ = tx.send(r);
        });
        // a solver that exits early closes the pipe; its output still counts
        let _ = stdin.write_all(script.as_bytes());
        drop(stdin);
        match rx.recv_timeout(self.timeout) {
            Ok(Ok(out)) => {
                let _ = child.wait();
                Ok(out)
            }
            Ok(Err(e)) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(format!("reading solver output: {e}"))
            }
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                Err("timeout".into())
            }
        }
    }
}

fn symbol(x: &Ident) -> String {
    format!("|{x}|")
}

fn int_literal(n: &BigInt) -> String {
    if n.sign() == num_bigint::Sign::Minus {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

/// The SMT-LIB rendering of a term.
pub fn to_smtlib(t: &Term) -> String {
    match t {
        Term::Const(Value::Int(n)) => int_literal(n),
        Term::Const(Value::Bool(b)) => b.to_string(),
        Term::Var(x) => symbol(x),
        Term::Apply(op, args) => {
            let a: Vec<String> = args.iter().map(to_smtlib).collect();
            match op {
                Op::Neg => format!("(- {})", a[0]),
                Op::Ne => format!("(not (= {} {}))", a[0], a[1]),
                Op::Not => format!("(not {})", a[0]),
                Op::And => format!("(and {} {})", a[0], a[1]),
                Op::Or => format!("(or {} {})", a[0], a[1]),
                _ => format!("({} {} {})", op.symbol(), a[0], a[1]),
            }
        }
    }
}

/// A complete script for `q`.
pub fn script(q: &Query) -> String {
    let mut s = String::from("(set-option :produce-models true)\n(set-logic QF_LIA)\n");
    for v in &q.vars {
        let _ = writeln!(s, "(declare-const {} Int)", symbol(v));
    }
    for a in &q.asserts {
        let _ = writeln!(s, "(assert {})", to_smtlib(a));
    }
    s.push_str("(check-sat)\n(get-model)\n(exit)\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn parse_sexps(text: &str) -> Vec<Sexp> {
    let chars: Vec<char> = text.chars().collect();
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                if stack.len() > 1 {
                    let done = stack.pop().unwrap();
                    stack.last_mut().unwrap().push(Sexp::List(done));
                }
            }
            '|' => {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '|' {
                    i += 1;
                }
                let s: String = chars[start..i.min(chars.len())].iter().collect();
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
            '"' => {
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
            }
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_whitespace() => {}
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"()|".contains(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                stack.last_mut().unwrap().push(Sexp::Atom(s));
                continue;
            }
        }
        i += 1;
    }
    while stack.len() > 1 {
        let done = stack.pop().unwrap();
        stack.last_mut().unwrap().push(Sexp::List(done));
    }
    stack.pop().unwrap()
}

fn sexp_int(s: &Sexp) -> Option<BigInt> {
    match s {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => sexp_int(x).map(|v| -v),
            _ => None,
        },
    }
}

/// Parses solver output: the status line followed by an optional model.
pub fn parse_response(out: &str, q: &Query) -> SolverResult {
    let items = parse_sexps(out);
    let Some(Sexp::Atom(status)) = items.first() else {
        return SolverResult::Unknown(format!("unexpected solver output: {}", out.trim()));
    };
    match status.as_str() {
        "unsat" => return SolverResult::Unsat,
        "sat" => {}
        other => return SolverResult::Unknown(format!("solver answered `{other}`")),
    }
    let by_name: BTreeMap<String, &Ident> = q.vars.iter().map(|v| (v.to_string(), v)).collect();
    let mut model = Assignment::new();
    let mut defs: Vec<&Sexp> = Vec::new();
    for item in &items[1..] {
        if let Sexp::List(inner) = item {
            if matches!(inner.first(), Some(Sexp::Atom(a)) if a == "model") {
                defs.extend(inner[1..].iter());
            } else {
                defs.extend(inner.iter());
            }
        }
    }
    for d in defs {
        if let Sexp::List(parts) = d {
            if let [Sexp::Atom(kw), Sexp::Atom(name), _, _, value] = parts.as_slice() {
                if kw == "define-fun" {
                    if let (Some(id), Some(v)) = (by_name.get(name), sexp_int(value)) {
                        model.set((*id).clone(), Value::Int(v));
                    }
                }
            }
        }
    }
    match q.check_model(&model) {
        Some(full) => SolverResult::Sat(full),
        None => SolverResult::Unknown("solver model failed verification".into()),
    }
}

impl Solver for SmtLibSolver {
    fn check(&self, q: &Query) -> SolverResult {
        match self.run(&script(q)) {
            Ok(out) => parse_response(&out, q),
            Err(e) => SolverResult::Unknown(e),
        }
    }

    fn name(&self) -> String {
        self.command.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn query(asserts: &[&str]) -> Query {
        let mut q = Query::new();
        for a in asserts {
            q.assert(parse_term(a).unwrap());
        }
        q
    }

    #[test]
    fn renders_terms() {
        let t = parse_term("-x + 3 * y != -2 && !(x < y)").unwrap();
        assert_eq!(
            to_smtlib(&t),
            "(and (not (= (+ (- |x|) (* 3 |y|)) (- 2))) (not (< |x| |y|)))"
        );
    }

    #[test]
    fn parses_models() {
        let q = query(&["x < 0", "y = 4"]);
        let out = "sat\n(\n  (define-fun |x| () Int\n    (- 3))\n  (define-fun y () Int 4)\n)\n";
        let SolverResult::Sat(m) = parse_response(out, &q) else { panic!() };
        assert_eq!(m.get(&Ident::cell("x")).unwrap(), &Value::int(-3));
        assert_eq!(parse_response("unsat\n(error \"no model\")", &q), SolverResult::Unsat);
        assert!(matches!(parse_response("unknown", &q), SolverResult::Unknown(_)));
    }

    #[test]
    fn wrong_models_are_rejected() {
        let q = query(&["x < 0"]);
        let out = "sat\n((define-fun x () Int 5))";
        assert!(matches!(parse_response(out, &q), SolverResult::Unknown(_)));
    }
}
