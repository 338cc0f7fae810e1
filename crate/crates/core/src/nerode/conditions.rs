use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{LanguageSample, RelationPresentation};
use crate::guards::{is_satisfiable, rename_guard, Guard, Renaming, SatResult, Theory, Variable};
use crate::symbolic::SymbolicWord;

/// One-line statements of the regularity conditions, indexed by number − 1.
pub const CONDITIONS: [&str; 11] = [
    "distinct markers of a word lie in distinct register classes",
    "transition equivalent words have location equivalent prefixes",
    "transition equivalent words end with the same input symbol",
    "guards of transition equivalent words agree under matching",
    "transition equivalent words are location equivalent",
    "a stored final parameter ends up in matching register classes",
    "register equivalence propagates forward along transition equivalence",
    "register equivalence propagates backward along transition equivalence",
    "registers read by a guard are stored by every location equivalent word",
    "location equivalent words admit the same (renamed) extensions",
    "overlapping extensions of location equivalent words are transition equivalent",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub words: Vec<SymbolicWord>,
    pub detail: String,
    /// For condition 10: the extension missing from the sample.
    pub extension: Option<SymbolicWord>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "condition {} violated: {}", self.condition, self.detail)?;
        for w in &self.words {
            writeln!(f, "  word: {w}")?;
        }
        if let Some(x) = &self.extension {
            writeln!(f, "  missing extension: {x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub violations: Vec<Violation>,
    /// Condition 10 instances whose conclusion lies beyond the depth bound.
    pub boundary_skips: usize,
    /// Satisfiability checks the theory could not decide.
    pub unknowns: Vec<String>,
    /// Instantiations examined per condition.
    pub instances: [usize; 11],
}

impl ConditionReport {
    pub fn is_regular(&self) -> bool {
        self.violations.is_empty() && self.unknowns.is_empty()
    }

    pub fn violated(&self, condition: u8) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.condition == condition)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            write!(f, "{v}")?;
        }
        for u in &self.unknowns {
            writeln!(f, "unknown: {u}")?;
        }
        writeln!(
            f,
            "{} violations, {} boundary skips, {} unknown",
            self.violations.len(),
            self.boundary_skips,
            self.unknowns.len()
        )
    }
}

pub fn check_conditions(sample: &LanguageSample, pres: &RelationPresentation, th: &dyn Theory) -> ConditionReport {
    check_selected(sample, pres, th, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11])
}

/// Only the listed conditions.
pub fn check_selected(
    sample: &LanguageSample,
    pres: &RelationPresentation,
    th: &dyn Theory,
    conditions: &[u8],
) -> ConditionReport {
    let mut c = Checker { sample, pres, th, report: ConditionReport::default(), cache: HashMap::new() };
    let on = |n: u8| conditions.contains(&n);
    if on(1) {
        c.condition_1();
    }
    let trans_pairs = pairs(groups(pres.trans.iter().map(|(k, v)| (*k, *v))), false);
    for &(u, u2) in &trans_pairs {
        if on(2) {
            c.condition_2(u, u2);
        }
        if on(3) {
            c.condition_3(u, u2);
        }
        if on(4) {
            c.condition_4(u, u2);
        }
        if on(5) {
            c.condition_5(u, u2);
        }
        if on(6) {
            c.condition_6(u, u2);
        }
        if on(7) {
            c.condition_7(u, u2);
        }
        if on(8) {
            c.condition_8(u, u2);
        }
    }
    let loc_pairs = pairs(groups(pres.loc.iter().copied().enumerate()), true);
    for &(w, w2) in &loc_pairs {
        if on(9) {
            c.condition_9(w, w2);
        }
        if on(10) {
            c.condition_10(w, w2);
        }
        if on(11) {
            c.condition_11(w, w2);
        }
    }
    c.report.violations.dedup();
    c.report
}

fn groups(entries: impl Iterator<Item = (usize, usize)>) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, class) in entries {
        out.entry(class).or_default().push(k);
    }
    out
}

/// Ordered pairs within each group.
fn pairs(groups: BTreeMap<usize, Vec<usize>>, reflexive: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for members in groups.values() {
        for &a in members {
            for &b in members {
                if reflexive || a != b {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

struct Checker<'a> {
    sample: &'a LanguageSample,
    pres: &'a RelationPresentation,
    th: &'a dyn Theory,
    report: ConditionReport,
    cache: HashMap<Guard, SatResult>,
}

impl Checker<'_> {
    fn word(&self, i: usize) -> &SymbolicWord {
        self.sample.word(i)
    }

    fn len(&self, i: usize) -> u32 {
        self.word(i).length() as u32
    }

    fn parent(&self, u: usize) -> usize {
        self.sample.parent(u).expect("transition classes only cover nonempty words")
    }

    fn last(&self, u: usize) -> (&str, &Guard) {
        self.word(u).last().expect("nonempty word")
    }

    fn matching(&self, w: usize, w2: usize) -> Option<Renaming> {
        // a failure here is a condition 1 violation, reported separately
        self.pres.matching(self.sample, w, w2).ok()
    }

    fn count(&mut self, condition: u8) {
        self.report.instances[condition as usize - 1] += 1;
    }

    fn violation(&mut self, condition: u8, words: &[usize], detail: String) {
        let words = words.iter().map(|i| self.word(*i).clone()).collect();
        self.report.violations.push(Violation { condition, words, detail, extension: None });
    }

    fn sat(&mut self, g: Guard, what: impl FnOnce() -> String) -> Option<bool> {
        let verdict = self.cache.entry(g.clone()).or_insert_with(|| is_satisfiable(&g, self.th)).clone();
        match verdict {
            SatResult::Sat(_) => Some(true),
            SatResult::Unsat => Some(false),
            SatResult::Unknown(why) => {
                self.report.unknowns.push(format!("{}: {why}", what()));
                None
            }
        }
    }

    fn condition_1(&mut self) {
        for e in self.pres.shared_register_classes() {
            if let super::NerodeError::SharedRegisterClass { word, first, second, class } = e {
                self.violation(1, &[word], format!("{first} and {second} share register class {class}"));
            }
        }
        self.report.instances[0] = self.pres.reg.len();
    }

    fn condition_2(&mut self, u: usize, u2: usize) {
        self.count(2);
        let (w, w2) = (self.parent(u), self.parent(u2));
        if self.pres.loc[w] != self.pres.loc[w2] {
            self.violation(2, &[u, u2], "prefixes are not location equivalent".into());
        }
    }

    fn condition_3(&mut self, u: usize, u2: usize) {
        self.count(3);
        let (a, b) = (self.last(u).0.to_string(), self.last(u2).0.to_string());
        if a != b {
            self.violation(3, &[u, u2], format!("input symbols {a} and {b} differ"));
        }
    }

    fn condition_4(&mut self, u: usize, u2: usize) {
        let ((a, g), (b, g2)) = (self.last(u), self.last(u2));
        if a != b {
            return;
        }
        let (g, g2) = (g.clone(), g2.clone());
        let Some(sigma) = self.matching(self.parent(u), self.parent(u2)) else { return };
        // an undefined G[σ] is a condition 9 matter
        let Ok(renamed) = rename_guard(&g, &sigma) else { return };
        self.count(4);
        if renamed != g2 {
            self.violation(4, &[u, u2], format!("G[σ] = {renamed} differs from {g2} under σ = {sigma}"));
        }
    }

    fn condition_5(&mut self, u: usize, u2: usize) {
        self.count(5);
        if self.pres.loc[u] != self.pres.loc[u2] {
            self.violation(5, &[u, u2], "words are not location equivalent".into());
        }
    }

    fn condition_6(&mut self, u: usize, u2: usize) {
        let (m, n) = (self.len(u), self.len(u2));
        let Some(class) = self.pres.reg_class(u, m) else { return };
        self.count(6);
        if self.pres.reg_class(u2, n) != Some(class) {
            self.violation(6, &[u, u2], format!("(u, v{m}) and (u′, v{n}) are not register equivalent"));
        }
    }

    fn condition_7(&mut self, u: usize, u2: usize) {
        let (w, w2) = (self.parent(u), self.parent(u2));
        let forwarded: Vec<(u32, usize)> = self.pres.stored(w).collect();
        for (v, class) in forwarded {
            let Some(target) = self.pres.reg_class(u, v) else { continue };
            let Some(v2) = self.pres.marker_in_class(w2, class) else { continue };
            self.count(7);
            if self.pres.reg_class(u2, v2) != Some(target) {
                self.violation(7, &[u, u2], format!("(w, v{v}) ≡r (w′, v{v2}) but not after the step"));
            }
        }
    }

    fn condition_8(&mut self, u: usize, u2: usize) {
        let (w, w2) = (self.parent(u), self.parent(u2));
        let fresh = self.len(u);
        let related: Vec<(u32, usize)> = self.pres.stored(u).filter(|(v, _)| *v != fresh).collect();
        for (v, class) in related {
            let Some(v2) = self.pres.marker_in_class(u2, class) else { continue };
            self.count(8);
            let before = self.pres.reg_class(w, v);
            if before.is_none() || before != self.pres.reg_class(w2, v2) {
                self.violation(8, &[u, u2], format!("(u, v{v}) ≡r (u′, v{v2}) but not before the step"));
            }
        }
    }

    fn condition_9(&mut self, w: usize, w2: usize) {
        let fresh = Variable::marker(self.len(w) + 1);
        let children: Vec<usize> = self.sample.children(w).collect();
        for u in children {
            let read: Vec<Variable> = self.last(u).1.vars().into_iter().filter(|v| *v != fresh).collect();
            for v in read {
                self.count(9);
                let k = v.marker_index().unwrap_or(0);
                let matched = self.pres.reg_class(w, k).and_then(|c| self.pres.marker_in_class(w2, c));
                if matched.is_none() {
                    self.violation(9, &[w, w2, u], format!("{v} is read but has no register equivalent in w′"));
                }
            }
        }
    }

    fn condition_10(&mut self, w: usize, w2: usize) {
        let Some(sigma) = self.matching(w, w2) else { return };
        let children: Vec<usize> = self.sample.children(w).collect();
        for u in children {
            let (a, g) = self.last(u);
            let (a, g) = (a.to_string(), g.clone());
            let Ok(renamed) = rename_guard(&g, &sigma) else { continue };
            if self.word(w2).length() + 1 > self.sample.depth() {
                self.report.boundary_skips += 1;
                continue;
            }
            self.count(10);
            let both = Guard::and([self.word(w2).guard(), renamed.clone()]);
            let extension = self.word(w2).extend(a, renamed);
            let Some(true) = self.sat(both, || format!("condition 10 for {extension}")) else { continue };
            if !self.sample.contains(&extension) {
                let words = vec![self.word(w).clone(), self.word(w2).clone(), self.word(u).clone()];
                self.report.violations.push(Violation {
                    condition: 10,
                    words,
                    detail: "a satisfiable renamed extension is missing from the sample".into(),
                    extension: Some(extension),
                });
            }
        }
    }

    fn condition_11(&mut self, w: usize, w2: usize) {
        let Some(sigma) = self.matching(w, w2) else { return };
        let children: Vec<usize> = self.sample.children(w).collect();
        let children2: Vec<usize> = self.sample.children(w2).collect();
        for &u in &children {
            let (a, g) = self.last(u);
            let (a, g) = (a.to_string(), g.clone());
            let Ok(renamed) = rename_guard(&g, &sigma) else { continue };
            for &u2 in &children2 {
                let (b, g2) = self.last(u2);
                if u == u2 || a != b {
                    continue;
                }
                let g2 = g2.clone();
                self.count(11);
                let both = Guard::and([renamed.clone(), g2]);
                let what = format!("condition 11 for {} and {}", self.word(u), self.word(u2));
                if self.sat(both, || what) != Some(true) {
                    continue;
                }
                if self.pres.trans.get(&u) != self.pres.trans.get(&u2) {
                    self.violation(11, &[u, u2], "overlapping extensions lie in different transition classes".into());
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivedDeterminismReport {
    /// Pairs of extensions that should have been transition equivalent.
    pub failures: Vec<(SymbolicWord, SymbolicWord)>,
    pub pairs: usize,
}

impl DerivedDeterminismReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for DerivedDeterminismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, u2) in &self.failures {
            writeln!(f, "not transition equivalent: {u}  vs  {u2}")?;
        }
        writeln!(f, "{} pairs checked, {} failures", self.pairs, self.failures.len())
    }
}

/// `w ≡l w′`, `wαG, w′αG′ ∈ L` and `G′ ≡ G[σ]` imply `wαG ≡t w′αG′`.
pub fn check_derived_determinism(sample: &LanguageSample, pres: &RelationPresentation) -> DerivedDeterminismReport {
    let mut report = DerivedDeterminismReport::default();
    for (w, w2) in pairs(groups(pres.loc.iter().copied().enumerate()), true) {
        let Ok(sigma) = pres.matching(sample, w, w2) else { continue };
        for u in sample.children(w) {
            let (a, g) = sample.word(u).last().unwrap();
            let Ok(renamed) = rename_guard(g, &sigma) else { continue };
            for u2 in sample.children(w2) {
                let (b, g2) = sample.word(u2).last().unwrap();
                if a != b || *g2 != renamed {
                    continue;
                }
                report.pairs += 1;
                if pres.trans.get(&u) != pres.trans.get(&u2) {
                    report.failures.push((sample.word(u).clone(), sample.word(u2).clone()));
                }
            }
        }
    }
    report
}
