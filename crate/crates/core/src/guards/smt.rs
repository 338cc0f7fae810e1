//! SMT-LIB v2 export and an external solver bridge.
//!
//! The external process receives the query on stdin and must print
//! `sat`, `unsat` or `unknown` on its first line, optionally followed by a
//! model in the usual `(define-fun x () Real value)` shape.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::{Command, Stdio};

use num_traits::{One, Signed, Zero};

use super::ast::{Atom, CmpOp, Guard, Variable};
use super::eval::{eval_guard, Valuation};
use super::theory::{SatResult, Theory};
use crate::value::{parse_value, Value};

/// A solver run as `sh -c <command>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalSolver {
    command: String,
}

impl ExternalSolver {
    pub fn new(command: impl Into<String>) -> ExternalSolver {
        ExternalSolver { command: command.into() }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Runs the solver on `g`. Models are verified against `th`; a model that
    /// does not satisfy `g` turns the answer into `Unknown`.
    pub fn check(&self, g: &Guard, th: &dyn Theory) -> SatResult {
        let mut query = to_smtlib(g);
        query.push_str("(get-model)\n");
        let output = match self.run(&query) {
            Ok(out) => out,
            Err(e) => return SatResult::Unknown(format!("solver failed: {e}")),
        };
        let mut lines = output.lines();
        match lines.next().map(str::trim) {
            Some("unsat") => SatResult::Unsat,
            Some("sat") => {
                let rest: String = lines.collect::<Vec<_>>().join("\n");
                let names = symbol_table(g);
                let mut model = parse_model(&rest, &names);
                for v in g.vars() {
                    if !model.contains(&v) {
                        model.insert(v, Value::zero());
                    }
                }
                match eval_guard(g, &model, th) {
                    Ok(true) => SatResult::Sat(model),
                    Ok(false) => SatResult::Unknown("solver model does not satisfy the guard".into()),
                    Err(e) => SatResult::Unknown(format!("solver model not checkable: {e}")),
                }
            }
            Some(other) => SatResult::Unknown(format!("solver answered {other:?}")),
            None => SatResult::Unknown("solver produced no output".into()),
        }
    }

    fn run(&self, query: &str) -> std::io::Result<String> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        child.stdin.take().expect("piped").write_all(query.as_bytes())?;
        let out = child.wait_with_output()?;
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }
}

/// Symbol used for `v` in exported queries.
pub fn smt_symbol(v: &Variable) -> String {
    let raw = v.to_string();
    if raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !raw.starts_with(|c: char| c.is_ascii_digit())
    {
        raw
    } else {
        format!("|{raw}|")
    }
}

fn symbol_table(g: &Guard) -> BTreeMap<String, Variable> {
    g.vars().into_iter().map(|v| (smt_symbol(&v).trim_matches('|').to_string(), v)).collect()
}

/// A complete `QF_NRA`/`QF_UFNRA` query asserting `g`, ending in `(check-sat)`.
pub fn to_smtlib(g: &Guard) -> String {
    let mut out = String::new();
    let uses_rel = g.atoms().iter().any(|a| matches!(a, Atom::Rel { .. }));
    let logic = if uses_rel { "QF_UFNRA" } else { "QF_NRA" };
    writeln!(out, "(set-logic {logic})").unwrap();
    for v in g.vars() {
        writeln!(out, "(declare-fun {} () Real)", smt_symbol(&v)).unwrap();
    }
    let mut rels: BTreeMap<&str, usize> = BTreeMap::new();
    for a in g.atoms() {
        if let Atom::Rel { symbol, args } = a {
            rels.insert(symbol, args.len());
        }
    }
    for (name, arity) in rels {
        let sorts = vec!["Real"; arity].join(" ");
        writeln!(out, "(declare-fun {name} ({sorts}) Bool)").unwrap();
    }
    writeln!(out, "(assert {})", guard_term(g)).unwrap();
    out.push_str("(check-sat)\n");
    out
}

fn value_term(d: &Value) -> String {
    let mag = d.abs();
    let body = if mag.denom().is_one() {
        format!("{}.0", mag.numer())
    } else {
        format!("(/ {}.0 {}.0)", mag.numer(), mag.denom())
    };
    if d.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn cmp(op: CmpOp, lhs: String, rhs: String) -> String {
    format!("({} {lhs} {rhs})", op.symbol())
}

fn atom_term(a: &Atom) -> String {
    let s = smt_symbol;
    match a {
        Atom::Eq(x, y) => format!("(= {} {})", s(x), s(y)),
        Atom::Lt(x, y) => format!("(< {} {})", s(x), s(y)),
        Atom::Le(x, y) => format!("(<= {} {})", s(x), s(y)),
        Atom::Const { var, op, value } => cmp(*op, s(var), value_term(value)),
        Atom::Sum(x, y, z) => format!("(= (+ {} {}) {})", s(x), s(y), s(z)),
        Atom::Poly { poly, op, rhs } => {
            let terms: Vec<String> = poly
                .terms()
                .iter()
                .map(|m| {
                    let mut factors = vec![value_term(&m.coeff)];
                    factors.extend(m.vars.iter().map(s));
                    format!("(* {})", factors.join(" "))
                })
                .collect();
            let lhs = if terms.len() == 1 { terms[0].clone() } else { format!("(+ {})", terms.join(" ")) };
            cmp(*op, lhs, value_term(rhs))
        }
        Atom::Rel { symbol, args } => {
            if args.is_empty() {
                symbol.clone()
            } else {
                format!("({symbol} {})", args.iter().map(s).collect::<Vec<_>>().join(" "))
            }
        }
    }
}

fn guard_term(g: &Guard) -> String {
    match g {
        Guard::True => "true".into(),
        Guard::Atom(a) => atom_term(a),
        Guard::Not(inner) => format!("(not {})", guard_term(inner)),
        Guard::And(cs) if cs.is_empty() => "true".into(),
        Guard::Or(cs) if cs.is_empty() => "false".into(),
        Guard::And(cs) if cs.len() == 1 => guard_term(&cs[0]),
        Guard::Or(cs) if cs.len() == 1 => guard_term(&cs[0]),
        Guard::And(cs) => format!("(and {})", cs.iter().map(guard_term).collect::<Vec<_>>().join(" ")),
        Guard::Or(cs) => format!("(or {})", cs.iter().map(guard_term).collect::<Vec<_>>().join(" ")),
    }
}

#[derive(Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            '|' => {
                for d in chars.by_ref() {
                    if d == '|' {
                        break;
                    }
                    cur.push(d);
                }
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_sexps(tokens: &[String]) -> Vec<Sexp> {
    fn one(tokens: &[String], pos: &mut usize) -> Option<Sexp> {
        let t = tokens.get(*pos)?;
        *pos += 1;
        if t == "(" {
            let mut items = Vec::new();
            while tokens.get(*pos).is_some_and(|t| t != ")") {
                items.push(one(tokens, pos)?);
            }
            *pos += 1;
            Some(Sexp::List(items))
        } else if t == ")" {
            None
        } else {
            Some(Sexp::Atom(t.clone()))
        }
    }
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < tokens.len() {
        match one(tokens, &mut pos) {
            Some(s) => out.push(s),
            None => continue,
        }
    }
    out
}

fn eval_value(e: &Sexp) -> Option<Value> {
    match e {
        Sexp::Atom(a) => parse_value(a),
        Sexp::List(items) => {
            let (Sexp::Atom(op), args) = items.split_first()? else {
                return None;
            };
            let vals: Vec<Value> = args.iter().map(eval_value).collect::<Option<_>>()?;
            match (op.as_str(), vals.as_slice()) {
                ("-", [x]) => Some(-x.clone()),
                ("-", [x, rest @ ..]) => Some(rest.iter().fold(x.clone(), |acc, y| acc - y)),
                ("+", xs) => Some(xs.iter().fold(Value::zero(), |acc, y| acc + y)),
                ("*", xs) => Some(xs.iter().fold(Value::one(), |acc, y| acc * y)),
                ("/", [x, y]) if !y.is_zero() => Some(x / y),
                _ => None,
            }
        }
    }
}

fn collect_defines(e: &Sexp, names: &BTreeMap<String, Variable>, out: &mut Valuation) {
    if let Sexp::List(items) = e {
        if let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(params), _sort, body] = items.as_slice() {
            if head == "define-fun" && params.is_empty() {
                if let (Some(v), Some(d)) = (names.get(name), eval_value(body)) {
                    out.insert(v.clone(), d);
                }
                return;
            }
        }
        for item in items {
            collect_defines(item, names, out);
        }
    }
}

fn parse_model(text: &str, names: &BTreeMap<String, Variable>) -> Valuation {
    let mut out = Valuation::new();
    for e in parse_sexps(&tokenize(text)) {
        collect_defines(&e, names, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{int, ratio};

    #[test]
    fn model_values_are_parsed() {
        let names: BTreeMap<String, Variable> =
            [("v1".to_string(), Variable::marker(1)), ("x".to_string(), Variable::register("x"))].into();
        let model = "(\n (define-fun v1 () Real (- 2.0))\n (define-fun x () Real (/ 1.0 3.0))\n)";
        let m = parse_model(model, &names);
        assert_eq!(m.get(&Variable::marker(1)), Some(&int(-2)));
        assert_eq!(m.get(&Variable::register("x")), Some(&ratio(1, 3)));
    }

    #[test]
    fn constant_comparisons_render_as_smt_operators() {
        let x = || Variable::register("x");
        let eq = Atom::Const { var: x(), op: CmpOp::Eq, value: int(3) };
        let ge = Atom::Const { var: x(), op: CmpOp::Ge, value: ratio(-1, 2) };
        assert_eq!(atom_term(&eq), "(= x 3.0)");
        assert_eq!(atom_term(&ge), "(>= x (- (/ 1.0 2.0)))");
    }
}
