use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{Guard, Variable};
use super::theory::Theory;
use super::GuardError;
use crate::value::{format_value, Value};

/// A finite partial map from variables to data values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(BTreeMap<Variable, Value>);

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn get(&self, var: &Variable) -> Option<&Value> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: Variable, value: Value) -> Option<Value> {
        self.0.insert(var, value)
    }

    pub fn remove(&mut self, var: &Variable) -> Option<Value> {
        self.0.remove(var)
    }

    pub fn with(mut self, var: Variable, value: Value) -> Valuation {
        self.0.insert(var, value);
        self
    }

    pub fn contains(&self, var: &Variable) -> bool {
        self.0.contains_key(var)
    }

    pub fn domain(&self) -> BTreeSet<Variable> {
        self.0.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ sigma`: defined on `x` when `sigma(x)` is defined and valued.
    pub fn compose(&self, sigma: &Renaming) -> Valuation {
        sigma
            .iter()
            .filter_map(|(x, y)| self.0.get(y).map(|d| (x.clone(), d.clone())))
            .collect()
    }

    /// Markers `v1..vn` valued in order, as used for concrete witnesses.
    pub fn from_markers(values: impl IntoIterator<Item = Value>) -> Valuation {
        values
            .into_iter()
            .enumerate()
            .map(|(i, d)| (Variable::marker(i as u32 + 1), d))
            .collect()
    }
}

impl FromIterator<(Variable, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (Variable, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        for (i, (var, value)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{var}↦{}", format_value(value))?;
        }
        Ok(())
    }
}

/// A finite partial map from variables to variables.
///
/// Assignments of register automata, the symbolic valuations of symbolic runs,
/// and matchings between symbolic words are all renamings.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming(BTreeMap<Variable, Variable>);

impl Renaming {
    pub fn new() -> Renaming {
        Renaming::default()
    }

    pub fn identity(vars: impl IntoIterator<Item = Variable>) -> Renaming {
        vars.into_iter().map(|v| (v.clone(), v)).collect()
    }

    pub fn get(&self, var: &Variable) -> Option<&Variable> {
        self.0.get(var)
    }

    pub fn insert(&mut self, from: Variable, to: Variable) -> Option<Variable> {
        self.0.insert(from, to)
    }

    pub fn with(mut self, from: Variable, to: Variable) -> Renaming {
        self.0.insert(from, to);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Variable)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<Variable> {
        self.0.keys().cloned().collect()
    }

    pub fn range(&self) -> BTreeSet<Variable> {
        self.0.values().cloned().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.range().len() == self.0.len()
    }

    /// `self ∘ rho`: `x ↦ self(rho(x))` wherever both are defined.
    pub fn compose(&self, rho: &Renaming) -> Renaming {
        rho.iter()
            .filter_map(|(x, y)| self.0.get(y).map(|z| (x.clone(), z.clone())))
            .collect()
    }

    /// Inverse of an injective renaming.
    pub fn inverse(&self) -> Option<Renaming> {
        if !self.is_injective() {
            return None;
        }
        Some(self.0.iter().map(|(x, y)| (y.clone(), x.clone())).collect())
    }
}

impl FromIterator<(Variable, Variable)> for Renaming {
    fn from_iter<I: IntoIterator<Item = (Variable, Variable)>>(iter: I) -> Self {
        Renaming(iter.into_iter().collect())
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        for (i, (x, y)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}↦{y}")?;
        }
        Ok(())
    }
}

/// Truth of `g` under `xi`. Every variable of `g` must be valued.
pub fn eval_guard(g: &Guard, xi: &Valuation, th: &dyn Theory) -> Result<bool, GuardError> {
    if let Some(missing) = g.vars().into_iter().find(|v| !xi.contains(v)) {
        return Err(GuardError::UndefinedVariable(missing));
    }
    eval_inner(g, xi, th)
}

fn eval_inner(g: &Guard, xi: &Valuation, th: &dyn Theory) -> Result<bool, GuardError> {
    Ok(match g {
        Guard::True => true,
        Guard::Atom(a) => th.eval_atom(a, xi)?,
        Guard::Not(inner) => !eval_inner(inner, xi, th)?,
        Guard::And(cs) => {
            for c in cs {
                if !eval_inner(c, xi, th)? {
                    return Ok(false);
                }
            }
            true
        }
        Guard::Or(cs) => {
            for c in cs {
                if eval_inner(c, xi, th)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// `g[sigma]` in canonical form. `sigma` must be defined on every variable of `g`.
pub fn rename_guard(g: &Guard, sigma: &Renaming) -> Result<Guard, GuardError> {
    if let Some(missing) = g.vars().into_iter().find(|v| sigma.get(v).is_none()) {
        return Err(GuardError::UndefinedVariable(missing));
    }
    Ok(g.map_vars(&mut |v| sigma.get(v).cloned().expect("checked above")))
}

/// Whether two guards have identical canonical forms.
pub fn alpha_equal(g1: &Guard, g2: &Guard) -> bool {
    g1.canonical() == g2.canonical()
}
