use std::collections::{BTreeMap, BTreeSet};

use super::{LanguageSample, NerodeError, RelationPresentation};
use crate::automaton::{RegisterAutomaton, Transition};
use crate::guards::{rename_guard, Renaming, Variable};

struct Names {
    locations: BTreeMap<usize, String>,
    registers: BTreeMap<usize, String>,
}

impl Names {
    /// `q0, q1, …` and `r0, r1, …` by first appearance in sorted sample order.
    fn new(sample: &LanguageSample, pres: &RelationPresentation) -> Names {
        let mut locations = BTreeMap::new();
        let mut registers = BTreeMap::new();
        for i in sample.sorted() {
            let next = locations.len();
            locations.entry(pres.loc[i]).or_insert_with(|| format!("q{next}"));
            for (_, c) in pres.stored(i) {
                let next = registers.len();
                registers.entry(c).or_insert_with(|| format!("r{next}"));
            }
        }
        Names { locations, registers }
    }

    fn register(&self, class: usize) -> Variable {
        Variable::register(self.registers[&class].clone())
    }
}

/// The transition that word `u` contributes: from `[w]_l` to `[u]_l` with
/// guard `G[τ]`, `τ` sending stored markers of `w` to their registers and
/// `v_{m+1}` to `p`.
fn transition_of(
    sample: &LanguageSample,
    pres: &RelationPresentation,
    names: &Names,
    u: usize,
) -> Result<Transition, NerodeError> {
    let ill = |m: String| NerodeError::SynthesisIllFormed(m);
    let w = sample.parent(u).expect("nonempty word");
    let fresh = sample.word(w).length() as u32 + 1;
    let (symbol, g) = sample.word(u).last().expect("nonempty word");

    let mut tau = Renaming::new().with(Variable::marker(fresh), Variable::Param);
    for (v, c) in pres.stored(w) {
        tau.insert(Variable::marker(v), names.register(c));
    }
    let guard = rename_guard(g, &tau)
        .map_err(|e| ill(format!("guard of {} is not expressible over the registers of its prefix: {e}", sample.word(u))))?;

    let mut rho = Renaming::new();
    for (v, c) in pres.stored(u) {
        let source = if v == fresh {
            Variable::Param
        } else {
            match pres.reg_class(w, v) {
                Some(c2) => names.register(c2),
                None => return Err(ill(format!("{} stores v{v}, which its prefix does not store", sample.word(u)))),
            }
        };
        if rho.insert(names.register(c), source).is_some() {
            return Err(ill(format!("{} assigns register {} twice", sample.word(u), names.registers[&c])));
        }
    }
    Ok(Transition::new(
        names.locations[&pres.loc[w]].clone(),
        symbol,
        guard,
        rho,
        names.locations[&pres.loc[u]].clone(),
    ))
}

/// One location per location class, one register per register class and
/// one transition per transition class. Members of a class must agree on
/// source, target and guard; the assignment is the union of their
/// assignments, since a member whose prefix leaves a register undefined
/// says nothing about copying it.
pub fn synthesize(sample: &LanguageSample, pres: &RelationPresentation) -> Result<RegisterAutomaton, NerodeError> {
    pres.validate(sample)?;
    let names = Names::new(sample, pres);
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in sample.sorted() {
        if let Some(&c) = pres.trans.get(&u) {
            classes.entry(c).or_default().push(u);
        }
    }
    let mut transitions = Vec::with_capacity(classes.len());
    for members in classes.values() {
        let mut t = transition_of(sample, pres, &names, members[0])?;
        for &u in &members[1..] {
            let other = transition_of(sample, pres, &names, u)?;
            let disagree = |what: &str, x: &dyn std::fmt::Display, y: &dyn std::fmt::Display| {
                NerodeError::SynthesisIllFormed(format!(
                    "{} and {} share a transition class but yield {what} {x} and {y}",
                    sample.word(members[0]),
                    sample.word(u)
                ))
            };
            if (&other.source, &other.symbol, &other.guard, &other.target) != (&t.source, &t.symbol, &t.guard, &t.target) {
                return Err(disagree("transitions", &t, &other));
            }
            for (x, y) in other.assignment.iter() {
                match t.assignment.get(x) {
                    Some(z) if z != y => return Err(disagree(&format!("for {x} sources"), z, y)),
                    Some(_) => {}
                    None => {
                        t.assignment.insert(x.clone(), y.clone());
                    }
                }
            }
        }
        if !t.assignment.is_injective() {
            return Err(NerodeError::SynthesisIllFormed(format!("assignment {} of {t} is not injective", t.assignment)));
        }
        transitions.push(t);
    }
    let alphabet: BTreeSet<String> = sample.words().iter().flat_map(|w| w.symbols()).map(str::to_string).collect();
    let initial = names.locations[&pres.loc[sample.index_of(&Default::default()).expect("ε is in the sample")]].clone();
    RegisterAutomaton::new(
        alphabet,
        names.locations.values().cloned(),
        initial,
        names.registers.values().cloned(),
        transitions,
    )
    .map_err(|e| NerodeError::SynthesisIllFormed(e.to_string()))
}
