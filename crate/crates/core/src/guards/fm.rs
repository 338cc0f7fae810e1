//! Fourier–Motzkin elimination over exact rationals.
//!
//! Decides conjunctions of strict and non-strict linear inequalities and
//! equalities, and produces a satisfying point by back substitution.
//! Equalities are eliminated by substitution before any inequality pairing.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

/// `Σ coeffs[k]·k  rel  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinConstraint<K: Ord> {
    pub coeffs: BTreeMap<K, Value>,
    pub rel: Rel,
    pub rhs: Value,
}

impl<K: Ord + Clone> LinConstraint<K> {
    pub fn new(coeffs: impl IntoIterator<Item = (K, Value)>, rel: Rel, rhs: Value) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            *map.entry(k).or_insert_with(Value::zero) += c;
        }
        map.retain(|_, c: &mut Value| !c.is_zero());
        LinConstraint { coeffs: map, rel, rhs }
    }

    fn holds_trivially(&self) -> bool {
        let zero = Value::zero();
        match self.rel {
            Rel::Lt => zero < self.rhs,
            Rel::Le => zero <= self.rhs,
            Rel::Eq => zero == self.rhs,
        }
    }

    /// Scales so the leading coefficient has magnitude one; for equalities the
    /// leading coefficient also becomes positive.
    fn normalized(mut self) -> Self {
        let Some(lead) = self.coeffs.values().next().cloned() else {
            return self;
        };
        let scale = if self.rel == Rel::Eq { lead } else { lead.abs() };
        if !scale.is_one() {
            for c in self.coeffs.values_mut() {
                *c /= &scale;
            }
            self.rhs /= &scale;
        }
        self
    }

    /// Substitutes `key := Σ def + constant`.
    fn substitute(&self, key: &K, def: &BTreeMap<K, Value>, constant: &Value) -> Self {
        let Some(a) = self.coeffs.get(key).cloned() else {
            return self.clone();
        };
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(key);
        for (k, c) in def {
            *coeffs.entry(k.clone()).or_insert_with(Value::zero) += &a * c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        LinConstraint { coeffs, rel: self.rel, rhs: &self.rhs - &a * constant }
    }

    fn slack(&self, assignment: &BTreeMap<K, Value>, skip: &K) -> Value {
        let mut rest = Value::zero();
        for (k, c) in &self.coeffs {
            if k != skip {
                rest += c * assignment.get(k).cloned().unwrap_or_else(Value::zero);
            }
        }
        &self.rhs - rest
    }
}

/// A satisfying assignment for all keys mentioned by `constraints`, or `None`
/// when the conjunction is unsatisfiable.
pub fn solve<K: Ord + Clone>(constraints: &[LinConstraint<K>]) -> Option<BTreeMap<K, Value>> {
    let mut assignment = solve_rec(constraints.to_vec())?;
    for c in constraints {
        for k in c.coeffs.keys() {
            assignment.entry(k.clone()).or_insert_with(Value::zero);
        }
    }
    debug_assert!(constraints.iter().all(|c| satisfied(c, &assignment)));
    Some(assignment)
}

pub fn satisfied<K: Ord + Clone>(c: &LinConstraint<K>, assignment: &BTreeMap<K, Value>) -> bool {
    let mut lhs = Value::zero();
    for (k, a) in &c.coeffs {
        lhs += a * assignment.get(k).cloned().unwrap_or_else(Value::zero);
    }
    match c.rel {
        Rel::Lt => lhs < c.rhs,
        Rel::Le => lhs <= c.rhs,
        Rel::Eq => lhs == c.rhs,
    }
}

fn solve_rec<K: Ord + Clone>(constraints: Vec<LinConstraint<K>>) -> Option<BTreeMap<K, Value>> {
    let mut set: BTreeSet<LinConstraint<K>> = BTreeSet::new();
    for c in constraints {
        if c.coeffs.is_empty() {
            if !c.holds_trivially() {
                return None;
            }
            continue;
        }
        set.insert(c.normalized());
    }
    if set.is_empty() {
        return Some(BTreeMap::new());
    }
    let constraints: Vec<LinConstraint<K>> = set.into_iter().collect();

    if let Some(eq) = constraints.iter().find(|c| c.rel == Rel::Eq).cloned() {
        let (key, lead) = eq.coeffs.iter().next().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        // key = (rhs - Σ others) / lead
        let def: BTreeMap<K, Value> = eq
            .coeffs
            .iter()
            .filter(|(k, _)| **k != key)
            .map(|(k, c)| (k.clone(), -(c / &lead)))
            .collect();
        let constant = &eq.rhs / &lead;
        let rest: Vec<LinConstraint<K>> = constraints
            .iter()
            .filter(|c| **c != eq)
            .map(|c| c.substitute(&key, &def, &constant))
            .collect();
        let mut assignment = solve_rec(rest)?;
        let mut value = constant;
        for (k, c) in &def {
            value += c * assignment.entry(k.clone()).or_insert_with(Value::zero).clone();
        }
        assignment.insert(key, value);
        return Some(assignment);
    }

    let key = pick_variable(&constraints);
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for c in constraints {
        match c.coeffs.get(&key) {
            Some(a) if a.is_positive() => upper.push(c),
            Some(_) => lower.push(c),
            None => rest.push(c),
        }
    }
    let mut projected = rest;
    for lo in &lower {
        for up in &upper {
            projected.push(combine(lo, up, &key));
        }
    }
    let mut assignment = solve_rec(projected)?;
    for c in lower.iter().chain(upper.iter()) {
        for k in c.coeffs.keys() {
            if *k != key {
                assignment.entry(k.clone()).or_insert_with(Value::zero);
            }
        }
    }
    let value = choose_value(&lower, &upper, &key, &assignment);
    assignment.insert(key, value);
    Some(assignment)
}

fn pick_variable<K: Ord + Clone>(constraints: &[LinConstraint<K>]) -> K {
    let mut counts: BTreeMap<&K, (usize, usize)> = BTreeMap::new();
    for c in constraints {
        for (k, a) in &c.coeffs {
            let entry = counts.entry(k).or_default();
            if a.is_positive() {
                entry.1 += 1;
            } else {
                entry.0 += 1;
            }
        }
    }
    counts
        .into_iter()
        .min_by_key(|(_, (l, u))| l * u)
        .map(|(k, _)| k.clone())
        .expect("nonempty constraint set")
}

/// Eliminates `key` from a lower bound (negative coefficient) and an upper
/// bound (positive coefficient).
fn combine<K: Ord + Clone>(lo: &LinConstraint<K>, up: &LinConstraint<K>, key: &K) -> LinConstraint<K> {
    let a_lo = -lo.coeffs[key].clone();
    let a_up = up.coeffs[key].clone();
    let mut coeffs: BTreeMap<K, Value> = BTreeMap::new();
    for (k, c) in &lo.coeffs {
        *coeffs.entry(k.clone()).or_insert_with(Value::zero) += c * &a_up;
    }
    for (k, c) in &up.coeffs {
        *coeffs.entry(k.clone()).or_insert_with(Value::zero) += c * &a_lo;
    }
    coeffs.retain(|_, c| !c.is_zero());
    let rel = if lo.rel == Rel::Lt || up.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
    LinConstraint { coeffs, rel, rhs: &lo.rhs * &a_up + &up.rhs * &a_lo }
}

fn choose_value<K: Ord + Clone>(
    lower: &[LinConstraint<K>],
    upper: &[LinConstraint<K>],
    key: &K,
    assignment: &BTreeMap<K, Value>,
) -> Value {
    // (bound, strict)
    let mut lo: Option<(Value, bool)> = None;
    for c in lower {
        let bound = c.slack(assignment, key) / &c.coeffs[key];
        let strict = c.rel == Rel::Lt;
        lo = match lo {
            Some((b, s)) if b > bound || (b == bound && s) => Some((b, s)),
            _ => Some((bound, strict)),
        };
    }
    let mut hi: Option<(Value, bool)> = None;
    for c in upper {
        let bound = c.slack(assignment, key) / &c.coeffs[key];
        let strict = c.rel == Rel::Lt;
        hi = match hi {
            Some((b, s)) if b < bound || (b == bound && s) => Some((b, s)),
            _ => Some((bound, strict)),
        };
    }
    let fits = |v: &Value| {
        let above = match &lo {
            Some((b, true)) => v > b,
            Some((b, false)) => v >= b,
            None => true,
        };
        let below = match &hi {
            Some((b, true)) => v < b,
            Some((b, false)) => v <= b,
            None => true,
        };
        above && below
    };
    let zero = Value::zero();
    if fits(&zero) {
        return zero;
    }
    let mut candidates = Vec::new();
    if let Some((b, strict)) = &lo {
        let c = if *strict { b.floor() + Value::one() } else { b.ceil() };
        candidates.push(c);
    }
    if let Some((b, strict)) = &hi {
        let c = if *strict { b.ceil() - Value::one() } else { b.floor() };
        candidates.push(c);
    }
    if let Some(c) = candidates.into_iter().find(|c| fits(c)) {
        return c;
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                l
            } else {
                (l + h) / Value::from_integer(2.into())
            }
        }
        (Some((l, _)), None) => l + Value::one(),
        (None, Some((h, _))) => h - Value::one(),
        (None, None) => zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{int, ratio};

    fn c(coeffs: &[(&'static str, i64)], rel: Rel, rhs: i64) -> LinConstraint<&'static str> {
        LinConstraint::new(coeffs.iter().map(|(k, v)| (*k, int(*v))), rel, int(rhs))
    }

    #[test]
    fn strict_cycle_is_unsat() {
        // x < y, y < x
        let cs = vec![c(&[("x", 1), ("y", -1)], Rel::Lt, 0), c(&[("y", 1), ("x", -1)], Rel::Lt, 0)];
        assert!(solve(&cs).is_none());
    }

    #[test]
    fn nonstrict_cycle_forces_equality() {
        let cs = vec![c(&[("x", 1), ("y", -1)], Rel::Le, 0), c(&[("y", 1), ("x", -1)], Rel::Le, 0)];
        let a = solve(&cs).unwrap();
        assert_eq!(a["x"], a["y"]);
    }

    #[test]
    fn open_interval_gets_interior_point() {
        // 0 < 2x < 1
        let cs = vec![c(&[("x", -2)], Rel::Lt, 0), c(&[("x", 2)], Rel::Lt, 1)];
        let a = solve(&cs).unwrap();
        assert!(a["x"] > int(0) && a["x"] < ratio(1, 2));
    }

    #[test]
    fn equalities_substitute() {
        // x + y = 0, x < 0, y < 3
        let cs = vec![
            c(&[("x", 1), ("y", 1)], Rel::Eq, 0),
            c(&[("x", 1)], Rel::Lt, 0),
            c(&[("y", 1)], Rel::Lt, 3),
        ];
        let a = solve(&cs).unwrap();
        assert!(cs.iter().all(|k| satisfied(k, &a)));
        let cs = vec![c(&[("x", 1), ("y", 1)], Rel::Eq, 0), c(&[("x", 1)], Rel::Lt, 0), c(&[("y", 1)], Rel::Le, 0)];
        assert!(solve(&cs).is_none());
    }

    #[test]
    fn constant_constraints() {
        assert!(solve(&[c(&[], Rel::Lt, 0)]).is_none());
        assert!(solve(&[c(&[], Rel::Le, 0)]).is_some());
    }
}
