use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ra_core::automaton::{check_well_formed_syntactic, validate, RegisterAutomaton, Transition};
use ra_core::catalog::load;
use ra_core::equiv::symbolic_equivalence;
use ra_core::guards::{parse_guard, RationalTheory, Renaming, Variable};
use ra_core::nerode::{
    check_conditions, check_derived_determinism, check_selected, extract_relations, join, merge_locations,
    parse_presentation, parse_sample, print_presentation, print_sample, propagate, synthesize, LanguageSample,
    NerodeError, RelationPresentation,
};
use ra_core::symbolic::SymbolicWord;

fn th() -> RationalTheory {
    RationalTheory::linear()
}

fn word(text: &str) -> SymbolicWord {
    SymbolicWord::parse(text).unwrap()
}

fn counts(p: &RelationPresentation) -> (usize, usize, usize) {
    (p.location_classes().len(), p.transition_classes().len(), p.register_classes().len())
}

#[test]
fn extraction_class_counts() {
    let (_, p) = extract_relations(&load("ordered").unwrap(), 3, &th()).unwrap();
    assert_eq!(counts(&p), (3, 4, 1));
    let (s, p) = extract_relations(&load("unsplit").unwrap(), 1, &th()).unwrap();
    assert_eq!(counts(&p), (2, 1, 0));
    assert_eq!(s.len(), 2);
    for name in ["ordered", "controller", "split"] {
        let (s, p) = extract_relations(&load(name).unwrap(), 0, &th()).unwrap();
        assert_eq!(s.words(), [SymbolicWord::empty()]);
        assert_eq!(counts(&p), (1, 0, 0));
    }
}

#[test]
fn extracted_counts_are_bounded_by_the_automaton() {
    for name in ["ordered", "split", "unsplit", "sign_zero_pos", "sign_zero_neg"] {
        let a = load(name).unwrap();
        let (_, p) = extract_relations(&a, 4, &th()).unwrap();
        let (l, t, r) = counts(&p);
        assert!(l <= a.locations().len() && t <= a.transitions().len() && r <= a.registers().len(), "{name}");
    }
}

#[test]
fn matching_renamings() {
    let (s, p) = extract_relations(&load("ordered").unwrap(), 3, &th()).unwrap();
    let w = s.index_of(&word("a [true]")).unwrap();
    let w2 = s.index_of(&word("a [true] ; a [v1 <= v2]")).unwrap();
    let m = |a: u32, b: u32| (Variable::marker(a), Variable::marker(b));
    assert_eq!(p.matching(&s, w, w2).unwrap(), [m(1, 2), m(2, 3)].into_iter().collect::<Renaming>());
    assert_eq!(p.matching(&s, w, w).unwrap(), [m(1, 1), m(2, 2)].into_iter().collect::<Renaming>());

    let (s, p) = extract_relations(&load("unsplit").unwrap(), 1, &th()).unwrap();
    let e = s.index_of(&SymbolicWord::empty()).unwrap();
    assert_eq!(p.matching(&s, e, e).unwrap(), [m(1, 1)].into_iter().collect::<Renaming>());
}

#[test]
fn matching_rejects_shared_classes() {
    let (s, mut p) = extract_relations(&load("ordered").unwrap(), 2, &th()).unwrap();
    let w = s.index_of(&word("a [true] ; a [v1 <= v2]")).unwrap();
    let w0 = s.index_of(&word("a [true]")).unwrap();
    p.reg.insert((w, 1), p.reg[&(w, 2)]);
    assert!(matches!(p.matching(&s, w0, w), Err(NerodeError::SharedRegisterClass { .. })));
    assert!(matches!(p.validate(&s), Err(NerodeError::SharedRegisterClass { .. })));
    let report = check_conditions(&s, &p, &th());
    assert_eq!(report.violated(1).count(), 1);
}

#[test]
fn extracted_presentations_are_regular() {
    for name in ["ordered", "split", "unsplit", "sign_zero_pos", "sign_zero_neg", "controller"] {
        let (s, p) = extract_relations(&load(name).unwrap(), 4, &th()).unwrap();
        p.validate(&s).unwrap();
        let report = check_conditions(&s, &p, &th());
        assert!(report.violations.is_empty(), "{name}:\n{report}");
        let derived = check_derived_determinism(&s, &p);
        assert!(derived.holds(), "{name}:\n{derived}");
    }
}

#[test]
fn derived_determinism_on_trivial_and_split_presentations() {
    let s = LanguageSample::new(0, [SymbolicWord::empty()], &th()).unwrap();
    let p = RelationPresentation { loc: vec![0], ..Default::default() };
    let d = check_derived_determinism(&s, &p);
    assert!(d.holds() && d.pairs == 0);

    // the ordered self loop taken twice, with its two uses split apart
    let (s, mut p) = extract_relations(&load("ordered").unwrap(), 3, &th()).unwrap();
    let u = s.index_of(&word("a [true] ; a [v1 <= v2] ; a [v2 <= v3]")).unwrap();
    p.trans.insert(u, 99);
    let d = check_derived_determinism(&s, &p);
    assert!(!d.holds());
    assert!(d.failures.iter().any(|(x, y)| *x == *s.word(u) || *y == *s.word(u)));
}

fn sign_samples() -> (LanguageSample, RelationPresentation, RelationPresentation) {
    let (s1, p1) = extract_relations(&load("sign_zero_pos").unwrap(), 4, &th()).unwrap();
    let (s2, p2) = extract_relations(&load("sign_zero_neg").unwrap(), 4, &th()).unwrap();
    assert_eq!(s1, s2);
    (s1, p1, p2)
}

#[test]
fn sign_language_sample() {
    let (s, p1, p2) = sign_samples();
    let expected = [
        "a [v1 > 0] ; a [v1 > 0] ; b [true]",
        "a [v1 = 0] ; a [v1 = 0] ; b [true]",
        "a [v1 < 0] ; c [v1 + v2 = 0] ; a [v2 > 0] ; c [true]",
    ];
    let mut all: Vec<SymbolicWord> = expected.iter().flat_map(|w| word(w).prefixes().collect::<Vec<_>>()).collect();
    all.sort();
    all.dedup();
    let mut got = s.words().to_vec();
    got.sort();
    assert_eq!(got, all);
    let idx = |t: &str| s.index_of(&word(t)).unwrap();
    let (w1, u1, z2) = (idx("a [v1 > 0]"), idx("a [v1 = 0]"), idx("a [v1 < 0] ; c [v1 + v2 = 0]"));
    assert_eq!(p1.loc[w1], p1.loc[u1]);
    assert_ne!(p1.loc[u1], p1.loc[z2]);
    assert_eq!(p2.loc[u1], p2.loc[z2]);
    assert_ne!(p2.loc[w1], p2.loc[u1]);
}

fn has_extension(report: &ra_core::nerode::ConditionReport, condition: u8, ext: &str) -> bool {
    report.violated(condition).any(|v| v.extension.as_ref() == Some(&word(ext)))
}

#[test]
fn joined_sign_presentations_violate_right_invariance() {
    let (s, p1, p2) = sign_samples();
    let closed = propagate(&s, &join(&p1, &p2));
    let report = check_conditions(&s, &closed, &th());
    assert!(has_extension(&report, 10, "a [v1 > 0] ; a [v1 > 0] ; c [true]"), "{report}");

    let w1 = s.index_of(&word("a [v1 > 0]")).unwrap();
    let z2 = s.index_of(&word("a [v1 < 0] ; c [v1 + v2 = 0]")).unwrap();
    let direct = propagate(&s, &merge_locations(&p1, w1, z2));
    assert_eq!(direct, closed);
}

#[test]
fn unclosed_merge_violates_determinism_first() {
    let (s, p1, _) = sign_samples();
    let w1 = s.index_of(&word("a [v1 > 0]")).unwrap();
    let z2 = s.index_of(&word("a [v1 < 0] ; c [v1 + v2 = 0]")).unwrap();
    let report = check_conditions(&s, &merge_locations(&p1, w1, z2), &th());
    assert!(report.violated(11).count() > 0, "{report}");
    assert_eq!(report.violated(10).count(), 0, "{report}");
}

/// Every set partition of `0..n`, as block labels.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn constant_sample(k: i64) -> LanguageSample {
    let words = std::iter::once(SymbolicWord::empty()).chain((1..=k).map(|i| word(&format!("a [v1 = {i}]"))));
    LanguageSample::new(1, words, &th()).unwrap()
}

#[test]
fn set_partition_counts() {
    assert_eq!(partitions(5).len(), 52);
    assert_eq!(partitions(6).len(), 203);
}

#[test]
fn constant_guards_need_one_transition_class_each() {
    let s = constant_sample(5);
    let nonempty: Vec<usize> = s.nonempty().collect();
    let e = s.index_of(&SymbolicWord::empty()).unwrap();
    for trans in partitions(5) {
        let blocks = trans.iter().max().unwrap() + 1;
        for loc in partitions(s.len()) {
            let pres = RelationPresentation {
                loc,
                trans: nonempty.iter().copied().zip(trans.iter().copied()).collect(),
                reg: BTreeMap::new(),
            };
            let report = check_selected(&s, &pres, &th(), &[4]);
            assert_eq!(report.violated(4).count() > 0, blocks < 5);
        }
        // the two-class location equivalence, with and without stored values
        let mut loc = vec![1; s.len()];
        loc[e] = 0;
        for store in [false, true] {
            let reg = if store { nonempty.iter().map(|u| ((*u, 1), 0)).collect() } else { BTreeMap::new() };
            let pres = RelationPresentation {
                loc: loc.clone(),
                trans: nonempty.iter().copied().zip(trans.iter().copied()).collect(),
                reg,
            };
            let report = check_conditions(&s, &pres, &th());
            assert_eq!(report.violated(4).count() > 0, blocks < 5);
            if blocks == 5 {
                assert!(report.violations.is_empty(), "{report}");
            }
        }
    }
}

fn round_trip(a: &RegisterAutomaton, depth: usize) -> RegisterAutomaton {
    let (s, p) = extract_relations(a, depth, &th()).unwrap();
    let report = check_conditions(&s, &p, &th());
    assert!(report.violations.is_empty(), "{report}");
    let b = synthesize(&s, &p).unwrap();
    assert!(validate(&b, &th()).is_ok());
    assert!(check_well_formed_syntactic(&b).well_formed);
    let verdict = symbolic_equivalence(a, &b, depth, &th());
    assert!(verdict.is_certified_equal(), "{verdict}\n{a}\n{b}");
    b
}

#[test]
fn synthesis_round_trips() {
    let b = round_trip(&load("ordered").unwrap(), 4);
    assert_eq!((b.locations().len(), b.transitions().len(), b.registers().len()), (3, 4, 1));
    assert_eq!(b.initial(), "q0");
    for name in ["split", "unsplit", "sign_zero_pos", "sign_zero_neg"] {
        round_trip(&load(name).unwrap(), 4);
    }
}

#[test]
fn synthesis_from_the_trivial_sample() {
    let s = LanguageSample::new(0, [SymbolicWord::empty()], &th()).unwrap();
    let p = RelationPresentation { loc: vec![0], ..Default::default() };
    let b = synthesize(&s, &p).unwrap();
    assert_eq!(b.locations().len(), 1);
    assert!(b.transitions().is_empty());
}

#[test]
fn synthesis_reports_disagreeing_representatives() {
    let (s, mut p) = extract_relations(&load("ordered").unwrap(), 2, &th()).unwrap();
    let a = s.index_of(&word("a [true] ; a [v1 <= v2]")).unwrap();
    let b = s.index_of(&word("a [true] ; a [v2 < v1]")).unwrap();
    p.trans.insert(b, p.trans[&a]);
    assert!(matches!(synthesize(&s, &p), Err(NerodeError::SynthesisIllFormed(_))));
}

#[test]
fn sample_and_presentation_files_round_trip() {
    let (s, p) = extract_relations(&load("sign_zero_neg").unwrap(), 4, &th()).unwrap();
    let s2 = parse_sample(&print_sample(&s), &th()).unwrap();
    assert_eq!(s2, s);
    assert_eq!(parse_presentation(&print_presentation(&s, &p), &s).unwrap(), p);
}

#[test]
fn malformed_samples_are_rejected() {
    let parse = |t: &str| parse_sample(t, &th());
    assert!(matches!(parse("depth: 1\na [true]\n"), Err(NerodeError::MissingEmptyWord)));
    assert!(matches!(parse("depth: 2\nε\na [true] ; a [v1 < v2]\n"), Err(NerodeError::NotPrefixClosed { .. })));
    assert!(matches!(parse("depth: 1\nε\na [v1 < 0 && v1 > 0]\n"), Err(NerodeError::Infeasible { .. })));
    assert!(matches!(parse("depth: 1\nε\na [v2 = 0]\n"), Err(NerodeError::Infeasible { .. })));
    assert!(matches!(parse("depth: 0\nε\na [true]\n"), Err(NerodeError::TooLong { .. })));
    assert!(matches!(parse("ε\n"), Err(NerodeError::SampleParse { .. })));
    assert!(matches!(parse("depth: 1\nε\nε\n"), Err(NerodeError::Duplicate(_))));
}

#[test]
fn malformed_presentations_are_rejected() {
    let s = parse_sample("depth: 1\nε\na [true]\n", &th()).unwrap();
    let parse = |t: &str| parse_presentation(t, &s);
    assert!(parse("[loc]\n0 -> 0\n1 -> 1\n[trans]\n1 -> 0\n[reg]\n1:v1 -> 0\n").is_ok());
    assert!(matches!(parse("[loc]\n0 -> 0\n[trans]\n1 -> 0\n"), Err(NerodeError::Presentation(_))));
    assert!(matches!(parse("[loc]\n0 -> 0\n1 -> 0\n"), Err(NerodeError::Presentation(_))));
    assert!(matches!(parse("[loc]\n0 -> 0\n1 -> 0\n[trans]\n0 -> 0\n1 -> 0\n"), Err(NerodeError::Presentation(_))));
    assert!(matches!(
        parse("[loc]\n0 -> 0\n1 -> 0\n[trans]\n1 -> 0\n[reg]\n1:v2 -> 0\n"),
        Err(NerodeError::Presentation(_))
    ));
    assert!(matches!(parse("0 -> 0\n"), Err(NerodeError::PresentationParse { .. })));
    assert!(matches!(parse("[loc]\n7 -> 0\n"), Err(NerodeError::PresentationParse { .. })));
}

/// Deterministic automata over order guards: each location refines the
/// comparison of `p` with one register into cells and keeps a random subset.
fn random_automaton(rng: &mut StdRng) -> RegisterAutomaton {
    let n = rng.gen_range(2..=4);
    let q = |i: usize| format!("q{i}");
    let regs = ["x", "y"];
    let reg = |s: &str| Variable::register(s);
    let assignments: Vec<Renaming> = vec![
        [(reg("x"), Variable::Param), (reg("y"), reg("y"))].into_iter().collect(),
        [(reg("x"), reg("x")), (reg("y"), Variable::Param)].into_iter().collect(),
        [(reg("x"), Variable::Param), (reg("y"), reg("x"))].into_iter().collect(),
        [(reg("x"), reg("y")), (reg("y"), reg("x"))].into_iter().collect(),
        [(reg("x"), reg("x")), (reg("y"), reg("y"))].into_iter().collect(),
        [(reg("x"), Variable::Param)].into_iter().collect(),
    ];
    let mut transitions = vec![Transition::new(
        q(0),
        "a",
        parse_guard("true").unwrap(),
        [(reg("x"), Variable::Param)].into_iter().collect(),
        q(1),
    )];
    for i in 1..n {
        for symbol in ["a", "b"] {
            let r = regs[rng.gen_range(0..2)];
            let cells = match rng.gen_range(0..3) {
                0 => vec![format!("p < {r}"), format!("p = {r}"), format!("p > {r}")],
                1 => vec![format!("p <= {r}"), format!("p > {r}")],
                _ => vec!["true".to_string()],
            };
            for cell in cells {
                if rng.gen_bool(0.6) {
                    let rho = assignments[rng.gen_range(0..assignments.len())].clone();
                    transitions.push(Transition::new(q(i), symbol, parse_guard(&cell).unwrap(), rho, q(rng.gen_range(0..n))));
                }
            }
        }
    }
    RegisterAutomaton::new(
        ["a".to_string(), "b".to_string()],
        (0..n).map(q),
        q(0),
        regs.iter().map(|s| s.to_string()),
        transitions,
    )
    .unwrap()
}

#[test]
fn generated_automata_round_trip() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut tried = 0;
    while tried < 40 {
        let a = random_automaton(&mut rng);
        if !check_well_formed_syntactic(&a).well_formed {
            continue;
        }
        tried += 1;
        assert!(validate(&a, &th()).is_ok());
        round_trip(&a, 3);
    }
}
