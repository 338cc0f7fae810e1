use std::collections::BTreeMap;

use super::{LanguageSample, NerodeError, RelationPresentation};
use crate::automaton::RegisterAutomaton;
use crate::guards::Theory;
use crate::symbolic::enumerate_symbolic;

/// The relations induced by an automaton on its symbolic language up to
/// `depth`: words are location equivalent when their runs end in the same
/// location, transition equivalent when they end with the same transition,
/// and `(w, v) ≡r (w′, v′)` when both final valuations hold the markers in the
/// same register. Class ids are location, transition and register indices.
pub fn extract_relations(
    a: &RegisterAutomaton,
    depth: usize,
    th: &dyn Theory,
) -> Result<(LanguageSample, RelationPresentation), NerodeError> {
    let e = enumerate_symbolic(a, depth, th);
    if let Some(w) = e.undetermined.keys().next() {
        return Err(NerodeError::Undetermined {
            word: w.clone(),
            reason: format!("{} enumerated words could not be decided", e.undetermined.len()),
        });
    }
    let locations: BTreeMap<&str, usize> = a.locations().iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
    let registers: BTreeMap<&str, usize> = a.registers().iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();

    let sample = LanguageSample::from_words(depth, e.accepted.keys().cloned().collect())?;
    let mut pres = RelationPresentation::default();
    for (i, run) in e.accepted.values().enumerate() {
        pres.loc.push(locations[run.final_location()]);
        if let Some(&t) = run.transitions.last() {
            pres.trans.insert(i, t);
        }
        for (x, v) in run.final_zeta().iter() {
            let x = x.register_name().expect("valuations are keyed by registers");
            let v = v.marker_index().expect("valuations range over markers");
            pres.reg.insert((i, v), registers[x]);
        }
    }
    Ok((sample, pres))
}
