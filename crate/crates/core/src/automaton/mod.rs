//! Register automata: data model, textual format, concrete execution,
//! determinism validation and well-formedness checks.

mod format;
mod run;
mod validate;
mod wellformed;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::guards::{Guard, GuardError, Renaming, Variable};

pub use format::{parse_automaton, print_automaton};
pub use run::{run_word, step, Configuration, DataSymbol, DataWord, Run, RunError, RunOutcome};
pub use validate::{validate, DeterminismViolation, ValidationReport};
pub use wellformed::{
    check_well_formed_bounded, check_well_formed_syntactic, BoundedVerdict, SyntacticReport,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown location {0:?}")]
    UnknownLocation(String),
    #[error("transition {index}: symbol {symbol:?} is not in the alphabet")]
    UnknownSymbol { index: usize, symbol: String },
    #[error("transition {index}: {var} is neither a register nor p")]
    UnknownVariable { index: usize, var: Variable },
    #[error("transition {index}: assignment {assignment} is not injective")]
    NotInjective { index: usize, assignment: Renaming },
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// `⟨source, symbol, guard, assignment, target⟩`. The assignment maps
/// registers to registers or `p`; registers outside its domain become
/// undefined after the step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: String,
    pub symbol: String,
    pub guard: Guard,
    pub assignment: Renaming,
    pub target: String,
}

impl Transition {
    pub fn new(
        source: impl Into<String>,
        symbol: impl Into<String>,
        guard: Guard,
        assignment: Renaming,
        target: impl Into<String>,
    ) -> Transition {
        Transition {
            source: source.into(),
            symbol: symbol.into(),
            guard: guard.canonical(),
            assignment,
            target: target.into(),
        }
    }

    /// Registers read by the guard.
    pub fn guard_registers(&self) -> BTreeSet<Variable> {
        self.guard.vars().into_iter().filter(|v| !v.is_param()).collect()
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --{}[ {} ]", self.source, self.symbol, self.guard)?;
        if self.assignment.is_empty() {
            f.write_str("{}")?;
        } else {
            f.write_str("{ ")?;
            for (i, (x, y)) in self.assignment.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}:={y}")?;
            }
            f.write_str(" }")?;
        }
        write!(f, "--> {}", self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterAutomaton {
    alphabet: BTreeSet<String>,
    locations: BTreeSet<String>,
    initial: String,
    registers: BTreeSet<String>,
    transitions: Vec<Transition>,
}

impl RegisterAutomaton {
    /// Checks the structural invariants: known locations and symbols, guards
    /// over registers and `p` only, injective assignments into registers and `p`.
    pub fn new(
        alphabet: impl IntoIterator<Item = String>,
        locations: impl IntoIterator<Item = String>,
        initial: impl Into<String>,
        registers: impl IntoIterator<Item = String>,
        transitions: Vec<Transition>,
    ) -> Result<RegisterAutomaton, AutomatonError> {
        let alphabet: BTreeSet<String> = alphabet.into_iter().collect();
        let mut locations: BTreeSet<String> = locations.into_iter().collect();
        let initial = initial.into();
        let registers: BTreeSet<String> = registers.into_iter().collect();
        locations.insert(initial.clone());
        let is_register = |v: &Variable| v.register_name().is_some_and(|n| registers.contains(n));
        for (index, t) in transitions.iter().enumerate() {
            for q in [&t.source, &t.target] {
                if !locations.contains(q) {
                    return Err(AutomatonError::UnknownLocation(q.clone()));
                }
            }
            if !alphabet.contains(&t.symbol) {
                return Err(AutomatonError::UnknownSymbol { index, symbol: t.symbol.clone() });
            }
            if let Some(var) = t.guard.vars().into_iter().find(|v| !(v.is_param() || is_register(v))) {
                return Err(AutomatonError::UnknownVariable { index, var });
            }
            for (x, y) in t.assignment.iter() {
                if !is_register(x) {
                    return Err(AutomatonError::UnknownVariable { index, var: x.clone() });
                }
                if !(is_register(y) || y.is_param()) {
                    return Err(AutomatonError::UnknownVariable { index, var: y.clone() });
                }
            }
            if !t.assignment.is_injective() {
                return Err(AutomatonError::NotInjective { index, assignment: t.assignment.clone() });
            }
        }
        Ok(RegisterAutomaton { alphabet, locations, initial, registers, transitions })
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn locations(&self) -> &BTreeSet<String> {
        &self.locations
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn registers(&self) -> &BTreeSet<String> {
        &self.registers
    }

    pub fn register_vars(&self) -> BTreeSet<Variable> {
        self.registers.iter().map(Variable::register).collect()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, index: usize) -> &Transition {
        &self.transitions[index]
    }

    /// Transitions leaving `source` on `symbol`, with their indices.
    pub fn outgoing<'a>(&'a self, source: &'a str, symbol: &'a str) -> impl Iterator<Item = (usize, &'a Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.source == source && t.symbol == symbol)
    }

    /// All transitions leaving `source`, with their indices.
    pub fn leaving<'a>(&'a self, source: &'a str) -> impl Iterator<Item = (usize, &'a Transition)> {
        self.transitions.iter().enumerate().filter(move |(_, t)| t.source == source)
    }
}

impl fmt::Display for RegisterAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_automaton(self))
    }
}
