//! Guards: boolean combinations of atoms over markers, registers and the
//! parameter, with evaluation, renaming, canonical forms and satisfiability.

mod ast;
mod eval;
pub(crate) mod fm;
mod parse;
mod smt;
mod solver;
mod theory;

use thiserror::Error;

pub use ast::{Atom, CmpOp, Guard, Monomial, Polynomial, RelationSymbol, Variable};
pub use eval::{alpha_equal, eval_guard, rename_guard, Renaming, Valuation};
pub use parse::{parse_guard, parse_variable, ParseError};
pub(crate) use parse::is_identifier;
pub use smt::{smt_symbol, to_smtlib, ExternalSolver};
pub use theory::{RationalTheory, SatResult, SolverCapability, Theory};

use num_traits::Zero;

use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("variable {0} is not defined")]
    UndefinedVariable(Variable),
    #[error("relation {} of arity {} is not declared by the theory", .0.name, .0.arity)]
    UndeclaredSymbol(RelationSymbol),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Decides satisfiability of `g` in `th`. A `Sat` witness is always a total
/// valuation of `Var(g)` that has been evaluated against `g`; a witness that
/// fails the check is reported as `Unknown`.
pub fn is_satisfiable(g: &Guard, th: &dyn Theory) -> SatResult {
    match th.satisfiable(g) {
        SatResult::Sat(mut w) => {
            let vars = g.vars();
            for v in &vars {
                if !w.contains(v) {
                    w.insert(v.clone(), Value::zero());
                }
            }
            let w: Valuation = w.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, d)| (v.clone(), d.clone())).collect();
            match eval_guard(g, &w, th) {
                Ok(true) => SatResult::Sat(w),
                Ok(false) => SatResult::Unknown("witness failed verification".into()),
                Err(e) => SatResult::Unknown(format!("witness not checkable: {e}")),
            }
        }
        other => other,
    }
}
