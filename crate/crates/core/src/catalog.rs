//! Bundled automata and the succinct equality-pattern family.

use crate::automaton::{parse_automaton, RegisterAutomaton, Transition};
use crate::guards::{Atom, Guard, Renaming, Variable};

const SOURCES: [(&str, &str); 8] = [
    ("ordered", include_str!("../automata/ordered.ra")),
    ("ordered_unsafe", include_str!("../automata/ordered_unsafe.ra")),
    ("controller", include_str!("../automata/controller.ra")),
    ("split", include_str!("../automata/split.ra")),
    ("unsplit", include_str!("../automata/unsplit.ra")),
    ("sign_zero_pos", include_str!("../automata/sign_zero_pos.ra")),
    ("sign_zero_neg", include_str!("../automata/sign_zero_neg.ra")),
    ("nondeterministic", include_str!("../automata/nondeterministic.ra")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A bundled automaton by name. Panics if the bundled text is malformed.
pub fn load(name: &str) -> Option<RegisterAutomaton> {
    source(name).map(|s| parse_automaton(s).unwrap_or_else(|e| panic!("bundled automaton {name}: {e}")))
}

/// Reads `2n` values into `x1..x2n`, then accepts `b` iff for every
/// `1 ≤ i < n`: `x_i = x_{i+1}` exactly when `x_{n+i} = x_{n+i+1}`.
pub fn succinct_family(n: usize) -> RegisterAutomaton {
    assert!(n >= 1, "the family starts at n = 1");
    let x = |i: usize| Variable::register(format!("x{i}"));
    let q = |i: usize| format!("q{i}");
    let mut transitions = Vec::new();
    for i in 1..=2 * n {
        let mut rho = Renaming::identity((1..i).map(x));
        rho.insert(x(i), Variable::Param);
        transitions.push(Transition::new(q(i - 1), "a", Guard::True, rho, q(i)));
    }
    let eq = |i: usize, j: usize| Guard::Atom(Atom::Eq(x(i), x(j)));
    let clauses = (1..n).map(|i| {
        let (l, r) = (eq(i, i + 1), eq(n + i, n + i + 1));
        Guard::or([Guard::and([l.clone(), r.clone()]), Guard::and([l.negate(), r.negate()])])
    });
    transitions.push(Transition::new(q(2 * n), "b", Guard::and(clauses), Renaming::new(), "q_ok"));
    let mut locations: Vec<String> = (0..=2 * n).map(q).collect();
    locations.push("q_ok".into());
    RegisterAutomaton::new(
        ["a".to_string(), "b".to_string()],
        locations,
        q(0),
        (1..=2 * n).map(|i| format!("x{i}")),
        transitions,
    )
    .expect("family automata are well typed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{parse_automaton, print_automaton};

    #[test]
    fn bundled_sources_round_trip() {
        for name in names() {
            let a = load(name).unwrap();
            assert_eq!(parse_automaton(&print_automaton(&a)).unwrap(), a, "{name}");
        }
    }

    #[test]
    fn family_shape() {
        let a = succinct_family(3);
        assert_eq!(a.locations().len(), 8);
        assert_eq!(a.transitions().len(), 7);
        assert_eq!(a.registers().len(), 6);
        assert_eq!(succinct_family(1).transitions()[2].guard, Guard::True);
    }
}
