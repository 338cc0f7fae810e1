use std::fmt;

use super::ast::{Atom, Guard};
use super::eval::Valuation;
use super::smt::ExternalSolver;
use super::solver::{search, SearchOutcome};
use super::GuardError;
use crate::value::Value;

/// Outcome of a satisfiability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Satisfiable, with a witness that has been checked against the guard.
    Sat(Valuation),
    Unsat,
    /// The theory could not decide; the reason is informational.
    Unknown(String),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, SatResult::Unknown(_))
    }
}

impl fmt::Display for SatResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatResult::Sat(w) => write!(f, "sat ({w})"),
            SatResult::Unsat => f.write_str("unsat"),
            SatResult::Unknown(why) => write!(f, "unknown ({why})"),
        }
    }
}

/// What a theory can decide on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverCapability {
    /// Linear rational arithmetic decided exactly; nonlinear atoms handled
    /// heuristically.
    LinearExact,
    /// Like `LinearExact`, deferring undecided queries to an external process.
    External,
    None,
}

/// Interpretation of relation symbols over the rational data domain, plus a
/// satisfiability procedure.
pub trait Theory: Send + Sync {
    fn name(&self) -> String;

    /// Whether the atom's symbol is declared with the atom's arity.
    fn declares(&self, atom: &Atom) -> bool;

    /// Truth of a single atom; every argument must be valued.
    fn eval_atom(&self, atom: &Atom, xi: &Valuation) -> Result<bool, GuardError>;

    /// Decides `g`. Callers should go through [`super::is_satisfiable`], which
    /// re-checks witnesses.
    fn satisfiable(&self, g: &Guard) -> SatResult;

    fn capability(&self) -> SolverCapability;
}

/// The built-in theory: exact rationals with `=`, `<`, `<=`, unary constant
/// comparisons, `sum`, linear combinations and (nonlinear) polynomial atoms.
#[derive(Clone, Debug, Default)]
pub struct RationalTheory {
    external: Option<ExternalSolver>,
}

impl RationalTheory {
    pub fn linear() -> RationalTheory {
        RationalTheory { external: None }
    }

    pub fn with_external(solver: ExternalSolver) -> RationalTheory {
        RationalTheory { external: Some(solver) }
    }

    pub fn external(&self) -> Option<&ExternalSolver> {
        self.external.as_ref()
    }
}

fn lookup(xi: &Valuation, v: &super::ast::Variable) -> Result<Value, GuardError> {
    xi.get(v).cloned().ok_or_else(|| GuardError::UndefinedVariable(v.clone()))
}

impl Theory for RationalTheory {
    fn name(&self) -> String {
        match &self.external {
            Some(s) => format!("linear+external:{}", s.command()),
            None => "linear".to_string(),
        }
    }

    fn declares(&self, atom: &Atom) -> bool {
        !matches!(atom, Atom::Rel { .. })
    }

    fn eval_atom(&self, atom: &Atom, xi: &Valuation) -> Result<bool, GuardError> {
        Ok(match atom {
            Atom::Eq(a, b) => lookup(xi, a)? == lookup(xi, b)?,
            Atom::Lt(a, b) => lookup(xi, a)? < lookup(xi, b)?,
            Atom::Le(a, b) => lookup(xi, a)? <= lookup(xi, b)?,
            Atom::Const { var, op, value } => op.holds(&lookup(xi, var)?, value),
            Atom::Sum(a, b, c) => lookup(xi, a)? + lookup(xi, b)? == lookup(xi, c)?,
            Atom::Poly { poly, op, rhs } => {
                let mut missing = None;
                let total = poly.eval(&mut |v| {
                    let got = xi.get(v).cloned();
                    if got.is_none() && missing.is_none() {
                        missing = Some(v.clone());
                    }
                    got
                });
                match total {
                    Some(t) => op.holds(&t, rhs),
                    None => return Err(GuardError::UndefinedVariable(missing.unwrap())),
                }
            }
            Atom::Rel { .. } => return Err(GuardError::UndeclaredSymbol(atom.symbol())),
        })
    }

    fn satisfiable(&self, g: &Guard) -> SatResult {
        let internal = match search(g) {
            SearchOutcome::Sat(w) => return SatResult::Sat(w),
            SearchOutcome::Unsat => return SatResult::Unsat,
            SearchOutcome::Unknown(why) => why,
        };
        match &self.external {
            Some(solver) => match solver.check(g, self) {
                SatResult::Unknown(why) => SatResult::Unknown(format!("{internal}; external: {why}")),
                decided => decided,
            },
            None => SatResult::Unknown(internal),
        }
    }

    fn capability(&self) -> SolverCapability {
        if self.external.is_some() {
            SolverCapability::External
        } else {
            SolverCapability::LinearExact
        }
    }
}
