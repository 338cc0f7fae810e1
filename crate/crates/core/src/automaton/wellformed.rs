use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{RegisterAutomaton, Transition};
use crate::guards::{Theory, Variable};
use crate::symbolic::{enumerate_symbolic, SymbolicRun};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntacticReport {
    pub well_formed: bool,
    /// Registers certainly defined on arrival, per syntactically reachable location.
    pub defined: BTreeMap<String, BTreeSet<String>>,
    /// Locations without a path from the initial location.
    pub unreachable: BTreeSet<String>,
    /// Transitions whose guard may read an undefined register.
    pub offending: Vec<usize>,
}

impl fmt::Display for SyntacticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, regs) in &self.defined {
            let regs: Vec<&str> = regs.iter().map(String::as_str).collect();
            writeln!(f, "defined({q}) = {{{}}}", regs.join(", "))?;
        }
        for q in &self.unreachable {
            writeln!(f, "unreachable location {q}")?;
        }
        for i in &self.offending {
            writeln!(f, "transition {i} may read an undefined register")?;
        }
        Ok(())
    }
}

fn defined_after(t: &Transition, before: &BTreeSet<String>) -> BTreeSet<String> {
    t.assignment
        .iter()
        .filter(|(_, y)| y.is_param() || y.register_name().is_some_and(|n| before.contains(n)))
        .filter_map(|(x, _)| x.register_name().map(str::to_string))
        .collect()
}

/// Greatest-fixpoint dataflow over syntactically reachable locations, with
/// nothing defined at the initial location. `true` implies well-formedness.
pub fn check_well_formed_syntactic(a: &RegisterAutomaton) -> SyntacticReport {
    let mut reachable = BTreeSet::from([a.initial().to_string()]);
    let mut queue = VecDeque::from([a.initial().to_string()]);
    while let Some(q) = queue.pop_front() {
        for (_, t) in a.leaving(&q) {
            if reachable.insert(t.target.clone()) {
                queue.push_back(t.target.clone());
            }
        }
    }

    let mut defined: BTreeMap<String, BTreeSet<String>> =
        reachable.iter().map(|q| (q.clone(), a.registers().clone())).collect();
    defined.insert(a.initial().to_string(), BTreeSet::new());
    loop {
        let mut changed = false;
        for q in &reachable {
            if q == a.initial() {
                continue;
            }
            let mut meet: Option<BTreeSet<String>> = None;
            for t in a.transitions().iter().filter(|t| &t.target == q && reachable.contains(&t.source)) {
                let post = defined_after(t, &defined[&t.source]);
                meet = Some(match meet {
                    None => post,
                    Some(m) => m.intersection(&post).cloned().collect(),
                });
            }
            let meet = meet.expect("reachable non-initial locations have an incoming transition");
            if meet != defined[q] {
                defined.insert(q.clone(), meet);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let offending: Vec<usize> = a
        .transitions()
        .iter()
        .enumerate()
        .filter(|(_, t)| reachable.contains(&t.source))
        .filter(|(_, t)| {
            t.guard_registers()
                .iter()
                .any(|v| !v.register_name().is_some_and(|n| defined[&t.source].contains(n)))
        })
        .map(|(i, _)| i)
        .collect();
    let unreachable = a.locations().difference(&reachable).cloned().collect();
    SyntacticReport { well_formed: offending.is_empty(), defined, unreachable, offending }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedVerdict {
    Ok,
    /// A symbolic run of length `< depth` followed by a transition reading a
    /// register outside `dom(ζ)`.
    Counterexample { run: SymbolicRun, transition: usize, missing: BTreeSet<Variable> },
    Unknown(String),
}

/// Checks the well-formedness condition on every symbolic run of length
/// `< depth`.
pub fn check_well_formed_bounded(a: &RegisterAutomaton, depth: usize, th: &dyn Theory) -> BoundedVerdict {
    if depth == 0 {
        return BoundedVerdict::Ok;
    }
    let e = enumerate_symbolic(a, depth - 1, th);
    let outgoing = |run: &SymbolicRun| -> Option<(usize, BTreeSet<Variable>)> {
        let defined = run.final_zeta().domain();
        a.leaving(run.final_location()).find_map(|(i, t)| {
            let missing: BTreeSet<Variable> = t.guard_registers().difference(&defined).cloned().collect();
            (!missing.is_empty()).then_some((i, missing))
        })
    };
    for run in e.accepted.values() {
        if let Some((transition, missing)) = outgoing(run) {
            return BoundedVerdict::Counterexample { run: run.clone(), transition, missing };
        }
    }
    for run in e.undetermined.values() {
        if outgoing(run).is_some() {
            return BoundedVerdict::Unknown(format!(
                "possible violation after {} whose feasibility is undecided",
                run.word()
            ));
        }
    }
    BoundedVerdict::Ok
}
