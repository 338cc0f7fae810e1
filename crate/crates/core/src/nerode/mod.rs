//! Finite presentations of the location, transition and register
//! equivalences over a depth-bounded symbolic sample: extraction from an
//! automaton, the regularity conditions, merging with closure, and synthesis
//! of an automaton from a presentation.

mod closure;
mod conditions;
mod extract;
mod format;
mod synthesize;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::guards::{Renaming, Theory, Variable};
use crate::symbolic::{is_feasible, Feasibility, SymbolicWord};

pub use closure::{join, merge_locations, propagate};
pub use conditions::{
    check_conditions, check_derived_determinism, check_selected, ConditionReport, DerivedDeterminismReport,
    Violation, CONDITIONS,
};
pub use extract::extract_relations;
pub use format::{parse_presentation, parse_sample, print_presentation, print_sample};
pub use synthesize::synthesize;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NerodeError {
    #[error("sample line {line}: {message}")]
    SampleParse { line: usize, message: String },
    #[error("presentation line {line}: {message}")]
    PresentationParse { line: usize, message: String },
    #[error("the sample does not contain the empty word")]
    MissingEmptyWord,
    #[error("{0} occurs twice in the sample")]
    Duplicate(SymbolicWord),
    #[error("{word} is longer than the depth bound {depth}")]
    TooLong { word: SymbolicWord, depth: usize },
    #[error("the prefix {prefix} of {word} is not in the sample")]
    NotPrefixClosed { word: SymbolicWord, prefix: SymbolicWord },
    #[error("{word} is not feasible: {reason}")]
    Infeasible { word: SymbolicWord, reason: String },
    #[error("satisfiability of {word} is undetermined: {reason}")]
    Undetermined { word: SymbolicWord, reason: String },
    #[error("ill-formed presentation: {0}")]
    Presentation(String),
    #[error("word {word}: markers {first} and {second} share register class {class}")]
    SharedRegisterClass { word: usize, first: Variable, second: Variable, class: usize },
    #[error("synthesis ill-formed: {0}")]
    SynthesisIllFormed(String),
}

/// A finite, prefix-closed set of feasible symbolic words of length at most
/// `depth`. Words are addressed by their position in the sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSample {
    depth: usize,
    words: Vec<SymbolicWord>,
    index: HashMap<SymbolicWord, usize>,
    parents: Vec<Option<usize>>,
}

impl LanguageSample {
    /// Checks membership of ε, bounds, prefix closure and feasibility.
    pub fn new(
        depth: usize,
        words: impl IntoIterator<Item = SymbolicWord>,
        th: &dyn Theory,
    ) -> Result<LanguageSample, NerodeError> {
        let sample = LanguageSample::from_words(depth, words.into_iter().collect())?;
        for w in &sample.words {
            match is_feasible(w, th) {
                Feasibility::Feasible(_) => {}
                Feasibility::Unknown(reason) => return Err(NerodeError::Undetermined { word: w.clone(), reason }),
                Feasibility::Unsatisfiable => {
                    return Err(NerodeError::Infeasible { word: w.clone(), reason: "unsatisfiable guard".into() })
                }
                Feasibility::OutOfScope { index, var } => {
                    return Err(NerodeError::Infeasible {
                        word: w.clone(),
                        reason: format!("guard {index} mentions {var}"),
                    })
                }
            }
        }
        Ok(sample)
    }

    /// Structural checks only; feasibility is the caller's responsibility.
    pub(crate) fn from_words(depth: usize, words: Vec<SymbolicWord>) -> Result<LanguageSample, NerodeError> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.length() > depth {
                return Err(NerodeError::TooLong { word: w.clone(), depth });
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(NerodeError::Duplicate(w.clone()));
            }
        }
        if !index.contains_key(&SymbolicWord::empty()) {
            return Err(NerodeError::MissingEmptyWord);
        }
        let mut parents = Vec::with_capacity(words.len());
        for w in &words {
            if w.is_empty() {
                parents.push(None);
                continue;
            }
            let prefix = w.prefix(w.length() - 1);
            match index.get(&prefix) {
                Some(&p) => parents.push(Some(p)),
                None => return Err(NerodeError::NotPrefixClosed { word: w.clone(), prefix }),
            }
        }
        Ok(LanguageSample { depth, words, index, parents })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[SymbolicWord] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &SymbolicWord {
        &self.words[i]
    }

    pub fn index_of(&self, w: &SymbolicWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &SymbolicWord) -> bool {
        self.index.contains_key(w)
    }

    /// The word without its last step.
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parents[i]
    }

    /// Indices of the nonempty words.
    pub fn nonempty(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len()).filter(|i| self.parents[*i].is_some())
    }

    /// Indices of the one-step extensions of word `i`.
    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len()).filter(move |j| self.parents[*j] == Some(i))
    }

    /// Indices ordered by their words.
    pub fn sorted(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.words.len()).collect();
        order.sort_by(|a, b| self.words[*a].cmp(&self.words[*b]));
        order
    }
}

/// Class maps for `≡l` (total), `≡t` (on nonempty words) and `≡r` (partial,
/// on `(word, marker index)` with index at most the word's length). Two
/// entries are related exactly when they carry the same class id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationPresentation {
    pub loc: Vec<usize>,
    pub trans: BTreeMap<usize, usize>,
    pub reg: BTreeMap<(usize, u32), usize>,
}

impl RelationPresentation {
    /// Totality of `loc`, domain of `trans`, marker ranges of `reg` and the
    /// single-class-per-marker requirement within a word.
    pub fn validate(&self, sample: &LanguageSample) -> Result<(), NerodeError> {
        let ill = |m: String| Err(NerodeError::Presentation(m));
        if self.loc.len() != sample.len() {
            return ill(format!("{} location entries for {} words", self.loc.len(), sample.len()));
        }
        for i in 0..sample.len() {
            let nonempty = sample.parent(i).is_some();
            match (nonempty, self.trans.contains_key(&i)) {
                (true, false) => return ill(format!("word {i} ({}) has no transition class", sample.word(i))),
                (false, true) => return ill("the empty word has a transition class".into()),
                _ => {}
            }
        }
        if let Some(i) = self.trans.keys().find(|i| **i >= sample.len()) {
            return ill(format!("transition entry for unknown word {i}"));
        }
        for &(i, v) in self.reg.keys() {
            if i >= sample.len() {
                return ill(format!("register entry for unknown word {i}"));
            }
            if v == 0 || v as usize > sample.word(i).length() {
                return ill(format!("word {i} has no marker v{v}"));
            }
        }
        match self.shared_register_classes().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Pairs of distinct markers of one word sitting in the same class.
    pub(crate) fn shared_register_classes(&self) -> Vec<NerodeError> {
        let mut seen: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut out = Vec::new();
        for (&(word, v), &class) in &self.reg {
            if let Some(first) = seen.insert((word, class), v) {
                out.push(NerodeError::SharedRegisterClass {
                    word,
                    first: Variable::marker(first),
                    second: Variable::marker(v),
                    class,
                });
            }
        }
        out
    }

    pub fn reg_class(&self, word: usize, v: u32) -> Option<usize> {
        self.reg.get(&(word, v)).copied()
    }

    /// Whether `(w, v) ≡r (w, v)`.
    pub fn stores(&self, word: usize, v: u32) -> bool {
        self.reg.contains_key(&(word, v))
    }

    /// `(marker index, class)` for each marker stored by `word`.
    pub fn stored(&self, word: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.reg.range((word, 0)..(word + 1, 0)).map(|(&(_, v), &c)| (v, c))
    }

    /// The marker of `word` in register class `class`.
    pub fn marker_in_class(&self, word: usize, class: usize) -> Option<u32> {
        self.stored(word).find(|(_, c)| *c == class).map(|(v, _)| v)
    }

    /// `matching(w, w′)`: stored markers of `w` to the marker of `w′` in the
    /// same class, and `v_{m+1} ↦ v_{n+1}`.
    pub fn matching(&self, sample: &LanguageSample, w: usize, w2: usize) -> Result<Renaming, NerodeError> {
        let (m, n) = (sample.word(w).length() as u32, sample.word(w2).length() as u32);
        let mut sigma = Renaming::new().with(Variable::marker(m + 1), Variable::marker(n + 1));
        for (v, class) in self.stored(w) {
            let mut targets = self.stored(w2).filter(|(_, c)| *c == class).map(|(v2, _)| v2);
            if let Some(v2) = targets.next() {
                if let Some(other) = targets.next() {
                    return Err(NerodeError::SharedRegisterClass {
                        word: w2,
                        first: Variable::marker(v2),
                        second: Variable::marker(other),
                        class,
                    });
                }
                sigma.insert(Variable::marker(v), Variable::marker(v2));
            }
        }
        if !sigma.is_injective() {
            return Err(NerodeError::Presentation(format!("matching({w}, {w2}) = {sigma} is not injective")));
        }
        Ok(sigma)
    }

    pub fn location_classes(&self) -> BTreeSet<usize> {
        self.loc.iter().copied().collect()
    }

    pub fn transition_classes(&self) -> BTreeSet<usize> {
        self.trans.values().copied().collect()
    }

    pub fn register_classes(&self) -> BTreeSet<usize> {
        self.reg.values().copied().collect()
    }

    /// Class ids renumbered `0, 1, …` by first occurrence in sample order.
    pub fn renumbered(&self) -> RelationPresentation {
        fn dense<K: Copy>(entries: impl Iterator<Item = (K, usize)>) -> Vec<(K, usize)> {
            let mut ids: HashMap<usize, usize> = HashMap::new();
            entries
                .map(|(k, c)| {
                    let next = ids.len();
                    (k, *ids.entry(c).or_insert(next))
                })
                .collect()
        }
        RelationPresentation {
            loc: dense(self.loc.iter().copied().enumerate()).into_iter().map(|(_, c)| c).collect(),
            trans: dense(self.trans.iter().map(|(k, c)| (*k, *c))).into_iter().collect(),
            reg: dense(self.reg.iter().map(|(k, c)| (*k, *c))).into_iter().collect(),
        }
    }
}
