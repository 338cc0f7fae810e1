//! Text syntax for guards.
//!
//! ```text
//! guard  := or
//! or     := and ('||' and)*
//! and    := unary ('&&' unary)*
//! unary  := '!' unary | 'true' | 'false' | '(' guard ')' | cmp | name '(' vars ')'
//! cmp    := expr op expr | abs op constant
//! op     := '=' | '==' | '!=' | '<' | '<=' | '>' | '>='
//! expr   := products of variables and rational constants with + - * and
//!           division by constants
//! ```
//!
//! `p` is the parameter, `v1`, `v2`, ... are markers, any other identifier is a
//! register. A comparison between two bare variables yields `=`, `<` or `<=`;
//! a bare variable against a constant yields a unary constant atom; anything
//! else becomes a polynomial atom. `abs(e)` and `|e|` may appear on the left of
//! a comparison with a constant. `sum(a, b, c)` is `a + b = c`; other
//! applications are uninterpreted relation symbols.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::ast::{Atom, CmpOp, Guard, Polynomial, Variable};
use crate::value::{parse_value, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

/// Parses and canonicalizes a guard.
pub fn parse_guard(text: &str) -> Result<Guard, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, len: text.len() };
    let g = p.guard()?;
    if p.pos < p.tokens.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(g.canonical())
}

/// Parses a single variable name.
pub fn parse_variable(text: &str) -> Result<Variable, ParseError> {
    let name = text.trim();
    if !is_identifier(name) {
        return Err(ParseError { message: format!("invalid variable name {name:?}"), offset: 0 });
    }
    variable_of(name).map_err(|message| ParseError { message, offset: 0 })
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

const RESERVED: [&str; 4] = ["true", "false", "sum", "abs"];

fn variable_of(name: &str) -> Result<Variable, String> {
    if name == "p" {
        return Ok(Variable::Param);
    }
    if let Some(digits) = name.strip_prefix('v') {
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            return match digits.parse::<u32>() {
                Ok(i) if i >= 1 => Ok(Variable::marker(i)),
                _ => Err(format!("marker index out of range in {name:?}")),
            };
        }
    }
    if RESERVED.contains(&name) {
        return Err(format!("{name:?} is reserved"));
    }
    Ok(Variable::register(name))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Value),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    const SYMBOLS: [(&str, &str); 24] = [
        ("&&", "&&"),
        ("||", "||"),
        ("==", "="),
        ("!=", "!="),
        ("<=", "<="),
        (">=", ">="),
        ("∧", "&&"),
        ("∨", "||"),
        ("¬", "!"),
        ("≤", "<="),
        ("≥", ">="),
        ("≠", "!="),
        ("⊤", "true"),
        ("⊥", "false"),
        ("=", "="),
        ("<", "<"),
        (">", ">"),
        ("!", "!"),
        ("(", "("),
        (")", ")"),
        (",", ","),
        ("+", "+"),
        ("-", "-"),
        ("*", "*"),
    ];
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        for (lit, tok) in SYMBOLS {
            if rest.starts_with(lit) {
                let t = match tok {
                    "true" | "false" => Tok::Ident(tok.to_string()),
                    _ => Tok::Sym(tok),
                };
                out.push((t, i));
                i += lit.len();
                continue 'outer;
            }
        }
        match c {
            '/' => {
                out.push((Tok::Sym("/"), i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Sym("|"), i));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let len = rest.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(rest.len());
                let lit = &rest[..len];
                let value = parse_value(lit)
                    .ok_or_else(|| ParseError { message: format!("invalid number {lit:?}"), offset: i })?;
                out.push((Tok::Num(value), i));
                i += len;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
                    .unwrap_or(rest.len());
                out.push((Tok::Ident(rest[..len].to_string()), i));
                i += len;
            }
            other => {
                return Err(ParseError { message: format!("unexpected character {other:?}"), offset: i });
            }
        }
    }
    Ok(out)
}

/// A polynomial with constant term (key `[]`), plus whether it was written as
/// a single bare variable.
#[derive(Clone, Debug)]
struct Expr {
    terms: BTreeMap<Vec<Variable>, Value>,
    bare: Option<Variable>,
}

impl Expr {
    fn constant(c: Value) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Expr { terms, bare: None }
    }

    fn var(v: Variable) -> Expr {
        Expr { terms: [(vec![v.clone()], Value::one())].into(), bare: Some(v) }
    }

    fn as_constant(&self) -> Option<Value> {
        match self.terms.len() {
            0 => Some(Value::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn scale(mut self, k: &Value) -> Expr {
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self.bare = None;
        self
    }

    fn add(mut self, other: Expr) -> Expr {
        for (k, c) in other.terms {
            *self.terms.entry(k).or_insert_with(Value::zero) += c;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self.bare = None;
        self
    }

    fn mul(self, other: &Expr) -> Expr {
        let mut out = Expr::constant(Value::zero());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key: Vec<Variable> = ka.iter().chain(kb.iter()).cloned().collect();
                key.sort();
                *out.terms.entry(key).or_insert_with(Value::zero) += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Splits into (polynomial without constant, constant).
    fn split(mut self) -> (Polynomial, Value) {
        let c = self.terms.remove(&Vec::new()).unwrap_or_else(Value::zero);
        (Polynomial::from_terms(self.terms.into_iter().map(|(k, v)| (v, k))), c)
    }
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ParseError {
        let offset = self.tokens.get(self.pos).map(|t| t.1).unwrap_or(self.len);
        ParseError { message: message.into(), offset }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.0)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected {sym:?}")))
        }
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat("||") {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Guard, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat("&&") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::And(parts) })
    }

    fn unary(&mut self) -> Result<Guard, ParseError> {
        if self.eat("!") {
            return Ok(Guard::Not(Box::new(self.unary()?)));
        }
        match self.peek() {
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                return Ok(Guard::True);
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                return Ok(Guard::falsum());
            }
            Some(Tok::Ident(s))
                if s != "abs" && matches!(self.peek_at(1), Some(Tok::Sym("("))) =>
            {
                return self.application();
            }
            _ => {}
        }
        let start = self.pos;
        match self.comparison() {
            Ok(g) => Ok(g),
            Err(cmp_err) => {
                self.pos = start;
                if self.eat("(") {
                    let g = self.guard()?;
                    self.expect(")")?;
                    Ok(g)
                } else {
                    Err(cmp_err)
                }
            }
        }
    }

    fn application(&mut self) -> Result<Guard, ParseError> {
        let Some(Tok::Ident(name)) = self.peek().cloned() else { unreachable!() };
        self.pos += 1;
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                match self.peek().cloned() {
                    Some(Tok::Ident(a)) => {
                        self.pos += 1;
                        args.push(variable_of(&a).map_err(|m| self.error(m))?);
                    }
                    _ => return Err(self.error("expected a variable argument")),
                }
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        if name == "sum" {
            let [a, b, c]: [Variable; 3] =
                args.try_into().map_err(|_| self.error("sum takes three arguments"))?;
            return Ok(Guard::Atom(Atom::Sum(a, b, c)));
        }
        if variable_of(&name).is_err() && name != "p" {
            return Err(self.error(format!("{name:?} cannot name a relation")));
        }
        Ok(Guard::Atom(Atom::Rel { symbol: name, args }))
    }

    fn cmp_op(&mut self) -> Result<&'static str, ParseError> {
        match self.peek() {
            Some(Tok::Sym(s @ ("=" | "!=" | "<" | "<=" | ">" | ">="))) => {
                let s = *s;
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a comparison operator")),
        }
    }

    fn comparison(&mut self) -> Result<Guard, ParseError> {
        let abs_lhs = if self.eat("|") {
            let e = self.expr()?;
            self.expect("|")?;
            Some(e)
        } else if matches!(self.peek(), Some(Tok::Ident(s)) if s == "abs")
            && matches!(self.peek_at(1), Some(Tok::Sym("(")))
        {
            self.pos += 2;
            let e = self.expr()?;
            self.expect(")")?;
            Some(e)
        } else {
            None
        };
        if let Some(e) = abs_lhs {
            let op = self.cmp_op()?;
            let rhs = self.expr()?;
            let c = rhs.as_constant().ok_or_else(|| self.error("absolute values compare with constants only"))?;
            return Ok(abs_comparison(e, op, c));
        }
        let lhs = self.expr()?;
        let op = self.cmp_op()?;
        let rhs = self.expr()?;
        Ok(comparison(lhs, op, rhs))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = acc.add(self.term()?);
            } else if self.eat("-") {
                acc = acc.add(self.term()?.scale(&-Value::one()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat("*") {
                let rhs = self.factor()?;
                acc = acc.mul(&rhs);
            } else if self.eat("/") {
                let rhs = self.factor()?;
                match rhs.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Value::one() / c)),
                    _ => return Err(self.error("division by a nonzero constant only")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Sym("-")) => {
                self.pos += 1;
                Ok(self.factor()?.scale(&-Value::one()))
            }
            Some(Tok::Sym("+")) => {
                self.pos += 1;
                self.factor()
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(Expr { bare: None, ..e })
            }
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::constant(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                variable_of(&name).map(Expr::var).map_err(|m| {
                    self.pos -= 1;
                    self.error(m)
                })
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}

fn op_of(op: &str) -> CmpOp {
    match op {
        "=" => CmpOp::Eq,
        "<" => CmpOp::Lt,
        "<=" => CmpOp::Le,
        ">" => CmpOp::Gt,
        ">=" => CmpOp::Ge,
        _ => unreachable!("{op}"),
    }
}

fn comparison(lhs: Expr, op: &str, rhs: Expr) -> Guard {
    if op == "!=" {
        return comparison(lhs, "=", rhs).negate();
    }
    if let (Some(a), Some(b)) = (&lhs.bare, &rhs.bare) {
        let (a, b) = (a.clone(), b.clone());
        return Guard::Atom(match op {
            "=" => Atom::Eq(a, b),
            "<" => Atom::Lt(a, b),
            "<=" => Atom::Le(a, b),
            ">" => Atom::Lt(b, a),
            _ => Atom::Le(b, a),
        });
    }
    let op = op_of(op);
    if let (Some(c), Some(v)) = (lhs.as_constant(), &rhs.bare) {
        return Guard::Atom(Atom::Const { var: v.clone(), op: op.flip(), value: c });
    }
    let (poly, c) = lhs.add(rhs.scale(&-Value::one())).split();
    Atom::compare(poly, op, -c)
}

fn abs_comparison(e: Expr, op: &str, c: Value) -> Guard {
    let neg = e.clone().scale(&-Value::one());
    let side = |x: Expr, op: &str| comparison(x, op, Expr::constant(c.clone()));
    match op {
        "<" | "<=" => Guard::and([side(e, op), side(neg, op)]),
        ">" | ">=" => Guard::or([side(e, op), side(neg, op)]),
        "=" if c.is_negative() => Guard::falsum(),
        "=" => Guard::or([side(e, "="), side(neg, "=")]),
        _ => abs_comparison(e, "=", c).negate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::int;

    fn v(i: u32) -> Variable {
        Variable::marker(i)
    }

    #[test]
    fn bare_comparisons() {
        assert_eq!(parse_guard("v1 <= v2").unwrap(), Guard::Atom(Atom::Le(v(1), v(2))));
        assert_eq!(parse_guard("v1 > v2").unwrap(), Guard::Atom(Atom::Lt(v(2), v(1))));
        assert_eq!(parse_guard("x != p").unwrap().to_string(), "!(x = p)");
        assert_eq!(
            parse_guard("3 < p").unwrap(),
            Guard::Atom(Atom::Const { var: Variable::Param, op: CmpOp::Gt, value: int(3) })
        );
    }

    #[test]
    fn grouping_versus_arithmetic() {
        let g = parse_guard("(x + 1) * 2 <= y || (v1 < v2 && true)").unwrap();
        assert_eq!(g.to_string(), "v1 < v2 || 2*x - y <= -2");
    }

    #[test]
    fn absolute_values_desugar() {
        let g = parse_guard("|p| <= 30").unwrap();
        assert_eq!(g, parse_guard("p <= 30 && -p <= 30").unwrap());
        assert_eq!(parse_guard("abs(p) = -1").unwrap(), Guard::falsum());
    }

    #[test]
    fn relations_and_sum() {
        assert_eq!(parse_guard("sum(v1, v2, p)").unwrap(), Guard::Atom(Atom::Sum(v(1), v(2), Variable::Param)));
        assert!(matches!(parse_guard("r(x, p)").unwrap(), Guard::Atom(Atom::Rel { .. })));
        assert!(parse_guard("sum(v1)").is_err());
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_guard("v1 < ").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(parse_guard("v0 = p").is_err());
        assert!(parse_guard("x = y)").is_err());
    }

    #[test]
    fn display_reparses() {
        for s in ["p = K*(sp - sv) && |p| <= 30", "v1 <= 1/3 || (1/3)*v1 + v2 > 2", "!(v1 = v2) && x < 0.5"] {
            let g = parse_guard(s).unwrap();
            assert_eq!(parse_guard(&g.to_string()).unwrap(), g, "{s} -> {g}");
        }
    }
}
