//! Symbolic words and runs, feasibility, bounded enumeration of the symbolic
//! language, and the correspondence between symbolic and concrete runs.

mod correspond;
mod enumerate;

use std::collections::BTreeSet;
use std::fmt;

use crate::automaton::RegisterAutomaton;
use crate::guards::{
    is_identifier, is_satisfiable, parse_guard, rename_guard, Guard, ParseError, Renaming, SatResult, Theory,
    Valuation, Variable,
};

pub use correspond::{abstract_run, concretize, WitnessRejected};
pub use enumerate::{enumerate_symbolic, Enumeration};

/// `α1 G1 ⋯ αn Gn`, guards canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicWord(Vec<(String, Guard)>);

impl SymbolicWord {
    pub fn empty() -> SymbolicWord {
        SymbolicWord(Vec::new())
    }

    pub fn from_steps(steps: impl IntoIterator<Item = (String, Guard)>) -> SymbolicWord {
        SymbolicWord(steps.into_iter().map(|(a, g)| (a, g.canonical())).collect())
    }

    pub fn steps(&self) -> &[(String, Guard)] {
        &self.0
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `G1 ∧ ⋯ ∧ Gn`.
    pub fn guard(&self) -> Guard {
        Guard::and(self.0.iter().map(|(_, g)| g.clone()))
    }

    pub fn prefix(&self, n: usize) -> SymbolicWord {
        SymbolicWord(self.0[..n].to_vec())
    }

    /// All prefixes, shortest first, including ε and the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = SymbolicWord> + '_ {
        (0..=self.0.len()).map(|n| self.prefix(n))
    }

    pub fn extend(&self, symbol: impl Into<String>, guard: Guard) -> SymbolicWord {
        let mut steps = self.0.clone();
        steps.push((symbol.into(), guard.canonical()));
        SymbolicWord(steps)
    }

    /// The last step, for nonempty words.
    pub fn last(&self) -> Option<(&str, &Guard)> {
        self.0.last().map(|(a, g)| (a.as_str(), g))
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.0.iter().map(|(a, _)| a.as_str()).collect()
    }

    /// Reads `a [true] ; a [v1 <= v2]`; `ε`, `eps` and the empty string denote
    /// the empty word. A step without brackets has guard `true`.
    pub fn parse(text: &str) -> Result<SymbolicWord, ParseError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "eps" {
            return Ok(SymbolicWord::empty());
        }
        let mut steps = Vec::new();
        let mut offset = 0;
        for part in text.split(';') {
            let err = |m: String| ParseError { message: m, offset };
            let item = part.trim();
            let (symbol, guard) = match item.find('[') {
                Some(open) => {
                    let inner = item[open + 1..]
                        .strip_suffix(']')
                        .ok_or_else(|| err(format!("expected ']' at the end of {item:?}")))?;
                    let g = parse_guard(inner).map_err(|e| ParseError { offset: offset + e.offset, ..e })?;
                    (item[..open].trim(), g)
                }
                None => (item, Guard::True),
            };
            if !is_identifier(symbol) {
                return Err(err(format!("invalid input symbol {symbol:?}")));
            }
            steps.push((symbol.to_string(), guard));
            offset += part.len() + 1;
        }
        Ok(SymbolicWord(steps))
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, (a, g)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{a} [{g}]")?;
        }
        Ok(())
    }
}

/// `(q0, ζ0) α1 g1 ϱ1 (q1, ζ1) ⋯`, with `ζ_i` mapping registers to markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicRun {
    pub locations: Vec<String>,
    pub zetas: Vec<Renaming>,
    pub transitions: Vec<usize>,
    word: SymbolicWord,
}

impl SymbolicRun {
    pub fn empty(a: &RegisterAutomaton) -> SymbolicRun {
        SymbolicRun {
            locations: vec![a.initial().to_string()],
            zetas: vec![Renaming::new()],
            transitions: Vec::new(),
            word: SymbolicWord::empty(),
        }
    }

    pub fn length(&self) -> usize {
        self.transitions.len()
    }

    pub fn final_location(&self) -> &str {
        self.locations.last().unwrap()
    }

    pub fn final_zeta(&self) -> &Renaming {
        self.zetas.last().unwrap()
    }

    pub fn word(&self) -> &SymbolicWord {
        &self.word
    }

    /// `ι_i = ζ_{i−1} ∪ {p ↦ v_i}` for `1 ≤ i ≤ n + 1`.
    pub fn iota(&self, i: usize) -> Renaming {
        self.zetas[i - 1].clone().with(Variable::Param, Variable::marker(i as u32))
    }

    /// Extends the run by transition `index`. Returns `None` when the guard
    /// reads a register outside `dom(ζ)`.
    pub fn extend(&self, a: &RegisterAutomaton, index: usize) -> Option<SymbolicRun> {
        let t = a.transition(index);
        let i = self.length() + 1;
        let iota = self.iota(i);
        let g = rename_guard(&t.guard, &iota).ok()?;
        let zeta = iota.compose(&t.assignment);
        check_run_invariants(&iota, &zeta, i);
        let mut next = self.clone();
        next.locations.push(t.target.clone());
        next.zetas.push(zeta);
        next.transitions.push(index);
        next.word = self.word.extend(t.symbol.clone(), g);
        Some(next)
    }
}

/// Ranges within `{v1..vi}` and injectivity of `ι_i` and `ζ_i`.
fn check_run_invariants(iota: &Renaming, zeta: &Renaming, i: usize) {
    let in_scope = |r: &Renaming| r.range().iter().all(|v| v.marker_index().is_some_and(|k| k as usize <= i));
    assert!(in_scope(iota) && in_scope(zeta), "marker out of scope at step {i}");
    assert!(iota.is_injective() && zeta.is_injective(), "symbolic valuation not injective at step {i}");
}

/// The symbolic trace `α1 G1 ⋯ αn Gn` with `G_i = g_i[ι_i]`.
pub fn strace(run: &SymbolicRun) -> &SymbolicWord {
    &run.word
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// No transition from the current location instantiates to `G_i`.
    NoMatchingTransition,
    /// `G1 ∧ ⋯ ∧ Gi` is unsatisfiable.
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolicOutcome {
    Accepted(SymbolicRun),
    /// `index` is 1-based.
    Rejected {
        index: usize,
        reason: Rejection,
    },
    /// The accumulated guard up to `index` could not be decided.
    Unknown {
        index: usize,
        reason: String,
    },
}

/// The unique symbolic run whose trace is `w`, if any.
pub fn symbolic_run(a: &RegisterAutomaton, w: &SymbolicWord, th: &dyn Theory) -> SymbolicOutcome {
    let mut run = SymbolicRun::empty(a);
    let mut undecided: Option<(usize, String)> = None;
    for (k, (symbol, g)) in w.steps().iter().enumerate() {
        let i = k + 1;
        let next = a
            .outgoing(run.final_location(), symbol)
            .filter_map(|(index, _)| run.extend(a, index))
            .find(|candidate| candidate.word.last().map(|(_, h)| h) == Some(g));
        let Some(next) = next else {
            return SymbolicOutcome::Rejected { index: i, reason: Rejection::NoMatchingTransition };
        };
        run = next;
        if undecided.is_none() {
            match is_satisfiable(&run.word.guard(), th) {
                SatResult::Sat(_) => {}
                SatResult::Unsat => return SymbolicOutcome::Rejected { index: i, reason: Rejection::Unsatisfiable },
                SatResult::Unknown(why) => undecided = Some((i, why)),
            }
        }
    }
    if let Some((index, _)) = &undecided {
        // a later decision can still refute the whole word
        match is_satisfiable(&run.word.guard(), th) {
            SatResult::Sat(_) => {}
            SatResult::Unsat => {
                return SymbolicOutcome::Rejected { index: w.length(), reason: Rejection::Unsatisfiable }
            }
            SatResult::Unknown(reason) => return SymbolicOutcome::Unknown { index: *index, reason },
        }
    }
    SymbolicOutcome::Accepted(run)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Valuation),
    /// `G_index` mentions a variable other than `v1..v_index`.
    OutOfScope { index: usize, var: Variable },
    Unsatisfiable,
    Unknown(String),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Scoping of every `G_i` plus satisfiability of `guard(w)`.
pub fn is_feasible(w: &SymbolicWord, th: &dyn Theory) -> Feasibility {
    for (k, (_, g)) in w.steps().iter().enumerate() {
        let i = k + 1;
        if let Some(var) = g
            .vars()
            .into_iter()
            .find(|v| !v.marker_index().is_some_and(|m| m as usize <= i))
        {
            return Feasibility::OutOfScope { index: i, var };
        }
    }
    match is_satisfiable(&w.guard(), th) {
        SatResult::Sat(witness) => Feasibility::Feasible(witness),
        SatResult::Unsat => Feasibility::Unsatisfiable,
        SatResult::Unknown(why) => Feasibility::Unknown(why),
    }
}

/// Markers `v1..vn`.
pub fn markers(n: usize) -> BTreeSet<Variable> {
    (1..=n as u32).map(Variable::marker).collect()
}
