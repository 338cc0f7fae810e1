use std::fmt;

use super::RegisterAutomaton;
use crate::guards::{is_satisfiable, Guard, SatResult, Theory, Valuation};

/// Two distinct same-symbol transitions from one location whose guards can
/// hold together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminismViolation {
    pub first: usize,
    pub second: usize,
    pub witness: Valuation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub determinism: Vec<DeterminismViolation>,
    /// Indices of transitions whose assignment is not injective.
    pub injectivity: Vec<usize>,
    /// Pairs the solver could not decide.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.determinism.is_empty() && self.injectivity.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.determinism {
            writeln!(
                f,
                "determinism violation: transitions {} and {} are both enabled under {}",
                v.first, v.second, v.witness
            )?;
        }
        for i in &self.injectivity {
            writeln!(f, "injectivity violation: transition {i}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

pub fn validate(a: &RegisterAutomaton, th: &dyn Theory) -> ValidationReport {
    let mut report = ValidationReport::default();
    let ts = a.transitions();
    for (i, t) in ts.iter().enumerate() {
        if !t.assignment.is_injective() {
            report.injectivity.push(i);
        }
        for (j, u) in ts.iter().enumerate().skip(i + 1) {
            if t.source != u.source || t.symbol != u.symbol {
                continue;
            }
            match is_satisfiable(&Guard::and([t.guard.clone(), u.guard.clone()]), th) {
                SatResult::Unsat => {}
                SatResult::Sat(witness) => report.determinism.push(DeterminismViolation { first: i, second: j, witness }),
                SatResult::Unknown(why) => {
                    report.warnings.push(format!("transitions {i} and {j}: disjointness unknown ({why})"))
                }
            }
        }
    }
    report
}
