//! Satisfiability search for the built-in rational theory.
//!
//! The canonical guard is expanded lazily into its disjunctive normal form:
//! conjunctions accumulate linear constraints, disjunctions (explicit or from
//! negated atoms such as `!(a = b)`) branch, and every partial conjunction is
//! pruned with Fourier–Motzkin elimination. Nonlinear monomials are treated as
//! opaque columns during pruning, which keeps `unsat` answers sound; a leaf
//! that still contains nonlinear monomials is attacked by fixing multiplier
//! variables to small constants.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::ast::{Atom, CmpOp, Guard, Variable};
use super::eval::Valuation;
use super::fm::{solve, LinConstraint, Rel};
use crate::value::{int, ratio, Value};

type Key = Vec<Variable>;
type Constraint = LinConstraint<Key>;

const MULTIPLIER_CANDIDATES: [(i64, i64); 11] =
    [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1), (-3, 1), (10, 1), (-10, 1)];
const MAX_FIXINGS: usize = 4096;

#[derive(Debug)]
pub(crate) enum SearchOutcome {
    Sat(Valuation),
    Unsat,
    Unknown(String),
}

enum Item<'g> {
    Guard(&'g Guard),
    Choice(Vec<Constraint>),
}

enum Branch<'g> {
    Or(&'g Guard, &'g [Guard]),
    Choice(Vec<Constraint>),
}

pub(crate) fn search(g: &Guard) -> SearchOutcome {
    let g = g.canonical();
    let vars = g.vars();
    match explore(vec![Item::Guard(&g)], Vec::new(), false) {
        SearchOutcome::Sat(partial) => {
            let mut witness = Valuation::new();
            for v in vars {
                let value = partial.get(&v).cloned().unwrap_or_else(Value::zero);
                witness.insert(v, value);
            }
            SearchOutcome::Sat(witness)
        }
        other => other,
    }
}

fn explore<'g>(mut pending: Vec<Item<'g>>, mut acc: Vec<Constraint>, mut opaque: bool) -> SearchOutcome {
    let mut branches: Vec<Branch<'g>> = Vec::new();
    while let Some(item) = pending.pop() {
        match item {
            Item::Choice(mut alts) => {
                if alts.len() == 1 {
                    acc.push(alts.pop().unwrap());
                } else {
                    branches.push(Branch::Choice(alts));
                }
            }
            Item::Guard(g) => match g {
                Guard::True => {}
                Guard::Atom(a) => match literal(a, true) {
                    Some(alts) => pending.push(Item::Choice(alts)),
                    None => opaque = true,
                },
                Guard::Not(inner) => match inner.as_ref() {
                    Guard::Atom(a) => match literal(a, false) {
                        Some(alts) => pending.push(Item::Choice(alts)),
                        None => opaque = true,
                    },
                    _ => unreachable!("canonical guards negate atoms only"),
                },
                Guard::And(cs) => pending.extend(cs.iter().map(Item::Guard)),
                Guard::Or(cs) if cs.is_empty() => return SearchOutcome::Unsat,
                Guard::Or(cs) => branches.push(Branch::Or(g, cs)),
            },
        }
    }

    let Some(relaxed) = solve(&acc) else {
        return SearchOutcome::Unsat;
    };
    if branches.is_empty() {
        return leaf(&acc, relaxed, opaque);
    }

    let pick = branches
        .iter()
        .enumerate()
        .min_by_key(|(_, b)| match b {
            Branch::Or(_, cs) => cs.len(),
            Branch::Choice(alts) => alts.len(),
        })
        .map(|(i, _)| i)
        .unwrap();
    let chosen = branches.swap_remove(pick);
    let rest_items = |branches: &[Branch<'g>]| -> Vec<Item<'g>> {
        branches
            .iter()
            .map(|b| match b {
                Branch::Or(g, _) => Item::Guard(g),
                Branch::Choice(alts) => Item::Choice(alts.clone()),
            })
            .collect()
    };

    let mut unknown: Option<String> = None;
    let alternatives: Vec<Item<'g>> = match chosen {
        Branch::Or(_, cs) => cs.iter().map(Item::Guard).collect(),
        Branch::Choice(alts) => alts.into_iter().map(|c| Item::Choice(vec![c])).collect(),
    };
    for alt in alternatives {
        let mut items = rest_items(&branches);
        items.push(alt);
        match explore(items, acc.clone(), opaque) {
            SearchOutcome::Sat(w) => return SearchOutcome::Sat(w),
            SearchOutcome::Unsat => {}
            SearchOutcome::Unknown(why) => unknown = Some(why),
        }
    }
    match unknown {
        Some(why) => SearchOutcome::Unknown(why),
        None => SearchOutcome::Unsat,
    }
}

fn leaf(acc: &[Constraint], relaxed: BTreeMap<Key, Value>, opaque: bool) -> SearchOutcome {
    if opaque {
        return SearchOutcome::Unknown("uninterpreted relation symbol".into());
    }
    if relaxed.keys().all(|k| k.len() == 1) {
        return SearchOutcome::Sat(
            relaxed.into_iter().map(|(k, v)| (k.into_iter().next().unwrap(), v)).collect(),
        );
    }
    match solve_by_fixing(acc) {
        Some(w) => SearchOutcome::Sat(w),
        None => SearchOutcome::Unknown("nonlinear constraints".into()),
    }
}

fn solve_by_fixing(acc: &[Constraint]) -> Option<Valuation> {
    let nonlinear: BTreeSet<&Key> = acc.iter().flat_map(|c| c.coeffs.keys()).filter(|k| k.len() > 1).collect();
    let mut fixed: Vec<Variable> = Vec::new();
    loop {
        let mut counts: BTreeMap<&Variable, usize> = BTreeMap::new();
        for key in &nonlinear {
            let free: Vec<&Variable> = key.iter().filter(|v| !fixed.contains(v)).collect();
            if free.len() > 1 {
                for v in free {
                    *counts.entry(v).or_default() += 1;
                }
            }
        }
        let Some((v, _)) = counts.into_iter().max_by_key(|(v, n)| (*n, std::cmp::Reverse((*v).clone()))) else {
            break;
        };
        fixed.push(v.clone());
    }

    let candidates: Vec<Value> = MULTIPLIER_CANDIDATES.iter().map(|(n, d)| ratio(*n, *d)).collect();
    let mut odometer = vec![0usize; fixed.len()];
    for _ in 0..MAX_FIXINGS {
        let values: BTreeMap<&Variable, &Value> =
            fixed.iter().zip(odometer.iter()).map(|(v, i)| (v, &candidates[*i])).collect();
        let linearized: Vec<Constraint> = acc
            .iter()
            .map(|c| {
                let mut coeffs: Vec<(Key, Value)> = Vec::new();
                let mut rhs = c.rhs.clone();
                for (key, coeff) in &c.coeffs {
                    let mut factor = coeff.clone();
                    let mut rest = Vec::new();
                    for v in key {
                        match values.get(v) {
                            Some(d) => factor *= *d,
                            None => rest.push(v.clone()),
                        }
                    }
                    if rest.is_empty() {
                        rhs -= factor;
                    } else {
                        coeffs.push((rest, factor));
                    }
                }
                LinConstraint::new(coeffs, c.rel, rhs)
            })
            .collect();
        if let Some(sol) = solve(&linearized) {
            let mut w: Valuation = sol.into_iter().map(|(k, v)| (k.into_iter().next().unwrap(), v)).collect();
            for (v, d) in values {
                w.insert(v.clone(), d.clone());
            }
            return Some(w);
        }
        let mut i = 0;
        loop {
            if i == odometer.len() {
                return None;
            }
            odometer[i] += 1;
            if odometer[i] < candidates.len() {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
    None
}

fn form(terms: impl IntoIterator<Item = (Value, Key)>) -> Vec<(Key, Value)> {
    terms.into_iter().map(|(c, k)| (k, c)).collect()
}

fn negate_form(f: &[(Key, Value)]) -> Vec<(Key, Value)> {
    f.iter().map(|(k, c)| (k.clone(), -c.clone())).collect()
}

/// `form op rhs` (or its negation) as alternative linear constraints.
fn compare(f: Vec<(Key, Value)>, op: CmpOp, rhs: Value, positive: bool) -> Vec<Constraint> {
    let lt = |f: Vec<(Key, Value)>, r: Value| LinConstraint::new(f, Rel::Lt, r);
    let le = |f: Vec<(Key, Value)>, r: Value| LinConstraint::new(f, Rel::Le, r);
    match (op, positive) {
        (CmpOp::Eq, true) => vec![LinConstraint::new(f, Rel::Eq, rhs)],
        (CmpOp::Eq, false) => vec![lt(f.clone(), rhs.clone()), lt(negate_form(&f), -rhs)],
        (CmpOp::Lt, true) | (CmpOp::Ge, false) => vec![lt(f, rhs)],
        (CmpOp::Le, true) | (CmpOp::Gt, false) => vec![le(f, rhs)],
        (CmpOp::Gt, true) | (CmpOp::Le, false) => vec![lt(negate_form(&f), -rhs)],
        (CmpOp::Ge, true) | (CmpOp::Lt, false) => vec![le(negate_form(&f), -rhs)],
    }
}

fn literal(atom: &Atom, positive: bool) -> Option<Vec<Constraint>> {
    let one = || int(1);
    let var = |v: &Variable| vec![v.clone()];
    Some(match atom {
        Atom::Eq(a, b) => compare(form([(one(), var(a)), (-one(), var(b))]), CmpOp::Eq, Value::zero(), positive),
        Atom::Lt(a, b) => compare(form([(one(), var(a)), (-one(), var(b))]), CmpOp::Lt, Value::zero(), positive),
        Atom::Le(a, b) => compare(form([(one(), var(a)), (-one(), var(b))]), CmpOp::Le, Value::zero(), positive),
        Atom::Const { var: v, op, value } => compare(form([(one(), var(v))]), *op, value.clone(), positive),
        Atom::Sum(a, b, c) => compare(
            form([(one(), var(a)), (one(), var(b)), (-one(), var(c))]),
            CmpOp::Eq,
            Value::zero(),
            positive,
        ),
        Atom::Poly { poly, op, rhs } => compare(
            form(poly.terms().iter().map(|m| (m.coeff.clone(), m.vars.clone()))),
            *op,
            rhs.clone(),
            positive,
        ),
        Atom::Rel { .. } => return None,
    })
}
