use thiserror::Error;

use super::SymbolicRun;
use crate::automaton::{Configuration, DataSymbol, DataWord, RegisterAutomaton, Run};
use crate::guards::{eval_guard, GuardError, Theory, Valuation, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessRejected {
    #[error("marker v{0} has no value")]
    MissingMarker(usize),
    #[error("the valuation does not satisfy the accumulated guard")]
    GuardFalse,
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// `run_A(δ, ξ)`: inputs `α_i(ξ(v_i))` and valuations `ξ ∘ ζ_i`.
pub fn concretize(run: &SymbolicRun, xi: &Valuation, th: &dyn Theory) -> Result<Run, WitnessRejected> {
    let n = run.length();
    for i in 1..=n {
        if !xi.contains(&Variable::marker(i as u32)) {
            return Err(WitnessRejected::MissingMarker(i));
        }
    }
    if !eval_guard(&run.word.guard(), xi, th)? {
        return Err(WitnessRejected::GuardFalse);
    }
    let word = DataWord(
        run.word
            .steps()
            .iter()
            .enumerate()
            .map(|(k, (a, _))| DataSymbol::new(a.clone(), xi.get(&Variable::marker(k as u32 + 1)).unwrap().clone()))
            .collect(),
    );
    let configurations = run
        .locations
        .iter()
        .zip(&run.zetas)
        .map(|(q, zeta)| Configuration { location: q.clone(), valuation: xi.compose(zeta) })
        .collect();
    Ok(Run { configurations, word, transitions: run.transitions.clone() })
}

/// The symbolic run following the transitions of `run`, and `ξ(v_i) = d_i`.
pub fn abstract_run(a: &RegisterAutomaton, run: &Run) -> (SymbolicRun, Valuation) {
    let mut sym = SymbolicRun::empty(a);
    for &index in &run.transitions {
        sym = sym.extend(a, index).expect("a concrete run only reads defined registers");
    }
    let xi = Valuation::from_markers(run.word.0.iter().map(|s| s.value.clone()));
    (sym, xi)
}
