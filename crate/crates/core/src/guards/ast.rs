use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::value::{format_value, Value};

/// A variable of a guard: a marker `v<i>`, a register, or the input parameter `p`.
///
/// The derived ordering (markers by index, registers by name, then `p`) is the
/// order used when canonicalizing guards.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Marker(u32),
    Register(String),
    Param,
}

impl Variable {
    /// Marker `v<index>`. Indices start at 1.
    pub fn marker(index: u32) -> Variable {
        assert!(index >= 1, "marker indices start at 1");
        Variable::Marker(index)
    }

    pub fn register(name: impl Into<String>) -> Variable {
        Variable::Register(name.into())
    }

    pub fn marker_index(&self) -> Option<u32> {
        match self {
            Variable::Marker(i) => Some(*i),
            _ => None,
        }
    }

    pub fn register_name(&self) -> Option<&str> {
        match self {
            Variable::Register(name) => Some(name),
            _ => None,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Variable::Param)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Marker(i) => write!(f, "v{i}"),
            Variable::Register(name) => f.write_str(name),
            Variable::Param => f.write_str("p"),
        }
    }
}

/// Comparison operator used by constant and polynomial atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    /// The operator obtained by swapping both sides of the comparison.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A product of variables with a nonzero rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Sorted, repetitions allowed (`x*x`).
    pub vars: Vec<Variable>,
    pub coeff: Value,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.vars.len()
    }
}

/// A polynomial without constant term, kept in normal form: monomials sorted by
/// their variable lists, no zero coefficients, no repeated variable lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn from_terms(terms: impl IntoIterator<Item = (Value, Vec<Variable>)>) -> Polynomial {
        let mut all: Vec<Monomial> = terms
            .into_iter()
            .map(|(coeff, mut vars)| {
                vars.sort();
                Monomial { vars, coeff }
            })
            .collect();
        all.sort_by(|a, b| a.vars.cmp(&b.vars));
        let mut terms: Vec<Monomial> = Vec::with_capacity(all.len());
        for m in all {
            match terms.last_mut() {
                Some(last) if last.vars == m.vars => last.coeff += m.coeff,
                _ => terms.push(m),
            }
        }
        terms.retain(|m| !m.coeff.is_zero());
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_linear(&self) -> bool {
        self.terms.iter().all(|m| m.degree() <= 1)
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.terms.iter().flat_map(|m| m.vars.iter().cloned()).collect()
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Variable) -> Variable) -> Polynomial {
        Polynomial::from_terms(
            self.terms.iter().map(|m| (m.coeff.clone(), m.vars.iter().map(&mut *f).collect())),
        )
    }

    pub fn eval(&self, lookup: &mut impl FnMut(&Variable) -> Option<Value>) -> Option<Value> {
        let mut total = Value::zero();
        for m in &self.terms {
            let mut prod = m.coeff.clone();
            for v in &m.vars {
                prod *= lookup(v)?;
            }
            total += prod;
        }
        Some(total)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            let negative = m.coeff.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = m.coeff.abs();
            if !magnitude.is_one() {
                let text = format_value(&magnitude);
                if text.contains('/') {
                    write!(f, "({text})*")?;
                } else {
                    write!(f, "{text}*")?;
                }
            }
            for (j, v) in m.vars.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

/// Name and arity of an interpreted relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// An atomic guard: a relation symbol applied to variables.
///
/// The built-in rational theory interprets every variant except
/// [`Atom::Rel`], which carries symbols of user supplied theories.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Eq(Variable, Variable),
    Lt(Variable, Variable),
    Le(Variable, Variable),
    /// `var op value`: the unary constant relations.
    Const { var: Variable, op: CmpOp, value: Value },
    /// `a + b = c`.
    Sum(Variable, Variable, Variable),
    /// `poly op rhs` over the variables of `poly`.
    Poly { poly: Polynomial, op: CmpOp, rhs: Value },
    Rel { symbol: String, args: Vec<Variable> },
}

impl Atom {
    pub fn vars(&self) -> Vec<&Variable> {
        match self {
            Atom::Eq(a, b) | Atom::Lt(a, b) | Atom::Le(a, b) => vec![a, b],
            Atom::Const { var, .. } => vec![var],
            Atom::Sum(a, b, c) => vec![a, b, c],
            Atom::Poly { poly, .. } => {
                let mut out: Vec<&Variable> = poly.terms.iter().flat_map(|m| m.vars.iter()).collect();
                out.sort();
                out.dedup();
                out
            }
            Atom::Rel { args, .. } => args.iter().collect(),
        }
    }

    pub fn symbol(&self) -> RelationSymbol {
        let (name, arity) = match self {
            Atom::Eq(..) => ("=".to_string(), 2),
            Atom::Lt(..) => ("<".to_string(), 2),
            Atom::Le(..) => ("<=".to_string(), 2),
            Atom::Const { op, value, .. } => (format!("·{}{}", op.symbol(), format_value(value)), 1),
            Atom::Sum(..) => ("sum".to_string(), 3),
            Atom::Poly { poly, op, rhs } => {
                let shape = poly.map_vars(&mut |_| Variable::Param);
                (format!("poly[{shape} {} {}]", op.symbol(), format_value(rhs)), self.vars().len())
            }
            Atom::Rel { symbol, args } => (symbol.clone(), args.len()),
        };
        RelationSymbol { name, arity }
    }

    /// Whether the atom leaves linear arithmetic.
    pub fn is_nonlinear(&self) -> bool {
        matches!(self, Atom::Poly { poly, .. } if !poly.is_linear())
    }

    /// Applies `f` to every variable occurrence and returns the resulting guard.
    /// Polynomial atoms are renormalized, so degenerate results collapse to
    /// constants.
    pub fn map_vars(&self, f: &mut impl FnMut(&Variable) -> Variable) -> Guard {
        match self {
            Atom::Eq(a, b) => Guard::Atom(Atom::Eq(f(a), f(b))),
            Atom::Lt(a, b) => Guard::Atom(Atom::Lt(f(a), f(b))),
            Atom::Le(a, b) => Guard::Atom(Atom::Le(f(a), f(b))),
            Atom::Const { var, op, value } => Guard::Atom(Atom::Const {
                var: f(var),
                op: *op,
                value: value.clone(),
            }),
            Atom::Sum(a, b, c) => Guard::Atom(Atom::Sum(f(a), f(b), f(c))),
            Atom::Poly { poly, op, rhs } => Atom::compare(poly.map_vars(f), *op, rhs.clone()),
            Atom::Rel { symbol, args } => Guard::Atom(Atom::Rel {
                symbol: symbol.clone(),
                args: args.iter().map(f).collect(),
            }),
        }
    }

    /// Normalizing constructor for `poly op rhs`: constant comparisons become
    /// `true`/`false` and `x op c` becomes a unary constant atom.
    pub fn compare(poly: Polynomial, op: CmpOp, rhs: Value) -> Guard {
        if poly.terms.is_empty() {
            return if op.holds(&Value::zero(), &rhs) { Guard::True } else { Guard::falsum() };
        }
        if let [m] = poly.terms.as_slice() {
            if m.degree() == 1 && m.coeff.is_one() {
                return Guard::Atom(Atom::Const { var: m.vars[0].clone(), op, value: rhs });
            }
        }
        Guard::Atom(Atom::Poly { poly, op, rhs })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
            Atom::Lt(a, b) => write!(f, "{a} < {b}"),
            Atom::Le(a, b) => write!(f, "{a} <= {b}"),
            Atom::Const { var, op, value } => write!(f, "{var} {} {}", op.symbol(), format_value(value)),
            Atom::Sum(a, b, c) => write!(f, "sum({a}, {b}, {c})"),
            Atom::Poly { poly, op, rhs } => write!(f, "{poly} {} {}", op.symbol(), format_value(rhs)),
            Atom::Rel { symbol, args } => {
                write!(f, "{symbol}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A guard: boolean combination of atoms.
///
/// Values produced by this crate are canonical: negation normal form, And/Or
/// children flattened, sorted and deduplicated, `true` units dropped. `false`
/// is the empty disjunction. Syntactic equality of canonical guards is the
/// `≡` relation used throughout.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    Atom(Atom),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn falsum() -> Guard {
        Guard::Or(Vec::new())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Guard::Or(cs) if cs.is_empty())
    }

    pub fn atom(atom: Atom) -> Guard {
        Guard::Atom(atom)
    }

    /// Canonical negation of a canonical guard.
    pub fn negate(&self) -> Guard {
        nnf(self, true)
    }

    /// Canonical conjunction.
    pub fn and(children: impl IntoIterator<Item = Guard>) -> Guard {
        let mut flat = Vec::new();
        for child in children {
            let child = child.canonical();
            match child {
                Guard::True => {}
                Guard::And(cs) => flat.extend(cs),
                c if c.is_false() => return Guard::falsum(),
                c => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => Guard::True,
            1 => flat.pop().unwrap(),
            _ => Guard::And(flat),
        }
    }

    /// Canonical disjunction.
    pub fn or(children: impl IntoIterator<Item = Guard>) -> Guard {
        let mut flat = Vec::new();
        for child in children {
            let child = child.canonical();
            match child {
                Guard::True => return Guard::True,
                Guard::Or(cs) => flat.extend(cs),
                c => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            1 => flat.pop().unwrap(),
            _ => Guard::Or(flat),
        }
    }

    /// Negation normal form with flattened, sorted, deduplicated children.
    pub fn canonical(&self) -> Guard {
        if self.is_canonical() {
            return self.clone();
        }
        nnf(self, false)
    }

    fn is_canonical(&self) -> bool {
        fn sorted_unique(cs: &[Guard]) -> bool {
            cs.windows(2).all(|w| w[0] < w[1])
        }
        match self {
            Guard::True | Guard::Atom(_) => true,
            Guard::Not(inner) => matches!(**inner, Guard::Atom(_)),
            Guard::And(cs) => {
                cs.len() >= 2
                    && sorted_unique(cs)
                    && cs.iter().all(|c| {
                        !matches!(c, Guard::True | Guard::And(_)) && !c.is_false() && c.is_canonical()
                    })
            }
            Guard::Or(cs) => {
                (cs.is_empty() || cs.len() >= 2)
                    && sorted_unique(cs)
                    && cs.iter().all(|c| !matches!(c, Guard::True | Guard::Or(_)) && c.is_canonical())
            }
        }
    }

    /// The exact set of variables occurring in the guard.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Guard::True => {}
            Guard::Atom(a) => out.extend(a.vars().into_iter().cloned()),
            Guard::Not(g) => g.collect_vars(out),
            Guard::And(cs) | Guard::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Guard::True => {}
            Guard::Atom(a) => out.push(a),
            Guard::Not(g) => g.collect_atoms(out),
            Guard::And(cs) | Guard::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Replaces variables through `f` and canonicalizes the result.
    pub fn map_vars(&self, f: &mut impl FnMut(&Variable) -> Variable) -> Guard {
        match self {
            Guard::True => Guard::True,
            Guard::Atom(a) => a.map_vars(f),
            Guard::Not(g) => g.map_vars(f).negate(),
            Guard::And(cs) => Guard::and(cs.iter().map(|c| c.map_vars(f)).collect::<Vec<_>>()),
            Guard::Or(cs) => Guard::or(cs.iter().map(|c| c.map_vars(f)).collect::<Vec<_>>()),
        }
    }
}

fn nnf(g: &Guard, negate: bool) -> Guard {
    match g {
        Guard::True => {
            if negate {
                Guard::falsum()
            } else {
                Guard::True
            }
        }
        Guard::Atom(a) => {
            if negate {
                Guard::Not(Box::new(Guard::Atom(a.clone())))
            } else {
                Guard::Atom(a.clone())
            }
        }
        Guard::Not(inner) => nnf(inner, !negate),
        Guard::And(cs) => {
            let children: Vec<Guard> = cs.iter().map(|c| nnf(c, negate)).collect();
            if negate {
                Guard::or(children)
            } else {
                Guard::and(children)
            }
        }
        Guard::Or(cs) => {
            let children: Vec<Guard> = cs.iter().map(|c| nnf(c, negate)).collect();
            if negate {
                Guard::and(children)
            } else {
                Guard::or(children)
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => f.write_str("true"),
            Guard::Or(cs) if cs.is_empty() => f.write_str("false"),
            Guard::Atom(a) => write!(f, "{a}"),
            Guard::Not(g) => write!(f, "!({g})"),
            Guard::And(cs) | Guard::Or(cs) => {
                let sep = if matches!(self, Guard::And(_)) { " && " } else { " || " };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if matches!(c, Guard::And(_) | Guard::Or(_)) && !c.is_false() {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::int;

    fn x() -> Variable {
        Variable::register("x")
    }

    #[test]
    fn canonical_drops_true_and_sorts() {
        let a = Guard::Atom(Atom::Le(Variable::marker(1), Variable::marker(2)));
        let b = Guard::Atom(Atom::Lt(Variable::marker(3), Variable::marker(2)));
        let g = Guard::And(vec![b.clone(), Guard::True, a.clone(), Guard::And(vec![a.clone()])]);
        assert_eq!(g.canonical(), Guard::And(vec![b.clone(), a.clone()]));
        assert_eq!(Guard::And(vec![a.clone(), Guard::True]).canonical(), a);
    }

    #[test]
    fn negation_is_pushed_to_atoms() {
        let a = Guard::Atom(Atom::Le(x(), Variable::Param));
        let b = Guard::Atom(Atom::Lt(Variable::Param, x()));
        let g = Guard::Not(Box::new(Guard::And(vec![a.clone(), Guard::Not(Box::new(b.clone()))])));
        let c = g.canonical();
        assert_eq!(c, Guard::Or(vec![b, Guard::Not(Box::new(a))]));
        assert_eq!(Guard::Not(Box::new(Guard::True)).canonical(), Guard::falsum());
        assert_eq!(Guard::falsum().negate(), Guard::True);
    }

    #[test]
    fn false_absorbs_conjunction() {
        let a = Guard::Atom(Atom::Le(x(), Variable::Param));
        assert!(Guard::and([a.clone(), Guard::falsum()]).is_false());
        assert_eq!(Guard::or([a.clone(), Guard::falsum()]), a);
        assert_eq!(Guard::or([a, Guard::True]), Guard::True);
    }

    #[test]
    fn polynomial_normalization() {
        let p = Polynomial::from_terms([
            (int(1), vec![Variable::Param]),
            (int(1), vec![x()]),
            (int(0), vec![Variable::marker(1)]),
        ]);
        assert_eq!(p.to_string(), "x + p");
        assert!(p.is_linear());
        let q = Polynomial::from_terms([(int(2), vec![x(), x()]), (int(-1), vec![x(), x()])]);
        assert_eq!(q.to_string(), "x*x");
        assert!(!q.is_linear());
        assert_eq!(Atom::compare(Polynomial::default(), CmpOp::Lt, int(1)), Guard::True);
        assert!(matches!(
            Atom::compare(Polynomial::from_terms([(int(1), vec![x()])]), CmpOp::Gt, int(0)),
            Guard::Atom(Atom::Const { .. })
        ));
    }
}
