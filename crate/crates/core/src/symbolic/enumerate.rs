use std::collections::{BTreeMap, BTreeSet};

use super::{SymbolicRun, SymbolicWord};
use crate::automaton::RegisterAutomaton;
use crate::guards::{is_satisfiable, SatResult, Theory};

/// The symbolic language of an automaton up to a length bound.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub depth: usize,
    /// Words of `L_s(A)` with their (unique) runs.
    pub accepted: BTreeMap<SymbolicWord, SymbolicRun>,
    /// Words whose accumulated guard the theory could not decide.
    pub undetermined: BTreeMap<SymbolicWord, SymbolicRun>,
    /// Runs of length `< depth` whose final location has a transition reading
    /// a register outside `dom(ζ)`, with that transition.
    pub ill_formed: Vec<(SymbolicRun, usize)>,
}

impl Enumeration {
    pub fn words(&self) -> BTreeSet<&SymbolicWord> {
        self.accepted.keys().collect()
    }

    pub fn is_complete(&self) -> bool {
        self.undetermined.is_empty()
    }

    /// Accepted and undetermined runs, in word order.
    pub fn runs(&self) -> impl Iterator<Item = &SymbolicRun> {
        let mut all: Vec<(&SymbolicWord, &SymbolicRun)> =
            self.accepted.iter().chain(self.undetermined.iter()).collect();
        all.sort_by(|a, b| a.0.cmp(b.0));
        all.into_iter().map(|(_, r)| r)
    }
}

/// Breadth-first extension of symbolic runs, pruning unsatisfiable prefixes.
pub fn enumerate_symbolic(a: &RegisterAutomaton, depth: usize, th: &dyn Theory) -> Enumeration {
    let empty = SymbolicRun::empty(a);
    let mut out = Enumeration {
        depth,
        accepted: BTreeMap::from([(empty.word.clone(), empty.clone())]),
        undetermined: BTreeMap::new(),
        ill_formed: Vec::new(),
    };
    let mut frontier = vec![empty];
    for _ in 0..depth {
        let mut next_frontier = Vec::new();
        for run in &frontier {
            let defined = run.final_zeta().domain();
            for (index, t) in a.leaving(run.final_location()) {
                if !t.guard_registers().is_subset(&defined) {
                    out.ill_formed.push((run.clone(), index));
                    continue;
                }
                let next = run.extend(a, index).expect("guard registers are defined");
                let word = next.word.clone();
                assert!(
                    !out.accepted.contains_key(&word) && !out.undetermined.contains_key(&word),
                    "two symbolic runs share the trace {word}"
                );
                match is_satisfiable(&word.guard(), th) {
                    SatResult::Unsat => continue,
                    SatResult::Sat(_) => {
                        // every prefix of a satisfiable word is satisfiable
                        for pre in word.prefixes() {
                            if let Some(r) = out.undetermined.remove(&pre) {
                                out.accepted.insert(pre, r);
                            }
                        }
                        out.accepted.insert(word, next.clone());
                    }
                    SatResult::Unknown(_) => {
                        out.undetermined.insert(word, next.clone());
                    }
                }
                next_frontier.push(next);
            }
        }
        frontier = next_frontier;
    }
    out
}
