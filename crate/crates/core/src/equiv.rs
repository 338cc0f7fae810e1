//! Bounded equivalence of two automata, over symbolic traces or over data
//! words.

use std::collections::BTreeMap;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::automaton::{run_word, DataSymbol, DataWord, RegisterAutomaton};
use crate::guards::{eval_guard, is_satisfiable, Guard, SatResult, Theory, Valuation, Variable};
use crate::symbolic::{enumerate_symbolic, Enumeration, SymbolicWord};
use crate::value::{int, ratio, Value};

const SAMPLES_PER_WORD: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    Data,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `sampled` counts words whose comparison fell back to random testing;
    /// zero means the verdict is certified.
    Equal { sampled: usize },
    /// `accepted_by` accepts `word` (and `data`, in data mode); the other side
    /// does not.
    Counterexample { accepted_by: Side, word: SymbolicWord, data: Option<DataWord> },
    Unknown(String),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }

    pub fn is_certified_equal(&self) -> bool {
        matches!(self, Verdict::Equal { sampled: 0 })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal { sampled: 0 } => f.write_str("equal (certified)"),
            Verdict::Equal { sampled } => write!(f, "equal (sampled: {sampled} words checked by random testing only)"),
            Verdict::Counterexample { accepted_by, word, data } => {
                write!(f, "counterexample ({accepted_by} only): {word}")?;
                if let Some(d) = data {
                    write!(f, "\ndata word: {d}")?;
                }
                Ok(())
            }
            Verdict::Unknown(why) => write!(f, "unknown: {why}"),
        }
    }
}

pub fn equivalence(a: &RegisterAutomaton, b: &RegisterAutomaton, mode: Mode, depth: usize, th: &dyn Theory) -> Verdict {
    match mode {
        Mode::Symbolic => symbolic_equivalence(a, b, depth, th),
        Mode::Data => data_equivalence(a, b, depth, th),
    }
}

/// Compares the symbolic languages up to `depth`; the shortest difference
/// is reported, preferring words only the left side accepts.
pub fn symbolic_equivalence(a: &RegisterAutomaton, b: &RegisterAutomaton, depth: usize, th: &dyn Theory) -> Verdict {
    let (ea, eb) = (enumerate_symbolic(a, depth, th), enumerate_symbolic(b, depth, th));
    let mut differences: Vec<(&SymbolicWord, Side, &[usize], bool)> = Vec::new();
    for (this, other, side) in [(&ea, &eb, Side::Left), (&eb, &ea, Side::Right)] {
        for (w, run) in &this.accepted {
            if !other.accepted.contains_key(w) {
                differences.push((w, side, &run.transitions, other.undetermined.contains_key(w)));
            }
        }
    }
    // ties go to the run taking the earliest transitions of its automaton
    differences.sort_by(|x, y| (x.0.length(), x.1, x.2).cmp(&(y.0.length(), y.1, y.2)));
    if let Some((w, side, _, _)) = differences.iter().find(|d| !d.3) {
        return Verdict::Counterexample { accepted_by: *side, word: (*w).clone(), data: None };
    }
    if let Some((w, ..)) = differences.first() {
        return Verdict::Unknown(format!("acceptance of {w} is undetermined on one side"));
    }
    let undetermined = ea.undetermined.keys().chain(eb.undetermined.keys()).find(|w| {
        !(ea.undetermined.contains_key(*w) && eb.undetermined.contains_key(*w))
    });
    match undetermined {
        Some(w) => Verdict::Unknown(format!("satisfiability of {w} is undetermined")),
        None => Verdict::Equal { sampled: 0 },
    }
}

/// Every run of the automaton up to the bound, keyed by symbol sequence.
fn by_symbols(e: &Enumeration) -> BTreeMap<Vec<&str>, Vec<&SymbolicWord>> {
    let mut out: BTreeMap<Vec<&str>, Vec<&SymbolicWord>> = BTreeMap::new();
    for w in e.accepted.keys().chain(e.undetermined.keys()) {
        out.entry(w.symbols()).or_default().push(w);
    }
    out
}

fn data_word(w: &SymbolicWord, xi: &Valuation) -> DataWord {
    DataWord(
        w.symbols()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let d = xi.get(&Variable::marker(i as u32 + 1)).cloned().unwrap_or_else(|| int(0));
                DataSymbol::new(*a, d)
            })
            .collect(),
    )
}

fn accepts(a: &RegisterAutomaton, d: &DataWord, th: &dyn Theory) -> bool {
    matches!(run_word(a, d, th), Ok(o) if o.is_accepted())
}

fn random_value(rng: &mut StdRng) -> Value {
    if rng.gen_bool(0.75) {
        int(rng.gen_range(-40..=40))
    } else {
        ratio(rng.gen_range(-80..=80), rng.gen_range(1..=4))
    }
}

enum Outcome {
    Covered,
    Sampled,
    Counterexample(DataWord),
    Unknown(String),
}

/// Whether every data word with a run along `w` in `this` is accepted by
/// `other`, whose runs over the same symbols are `others`.
fn covered(
    w: &SymbolicWord,
    others: &[&SymbolicWord],
    this: &RegisterAutomaton,
    other: &RegisterAutomaton,
    rng: &mut StdRng,
    th: &dyn Theory,
) -> Outcome {
    let rest = Guard::or(others.iter().map(|o| o.guard()));
    let difference = Guard::and([w.guard(), rest.negate()]);
    match is_satisfiable(&difference, th) {
        SatResult::Unsat => Outcome::Covered,
        SatResult::Sat(xi) => {
            let d = data_word(w, &xi);
            if accepts(this, &d, th) && !accepts(other, &d, th) {
                Outcome::Counterexample(d)
            } else {
                Outcome::Unknown(format!("witness {d} for {w} does not replay"))
            }
        }
        SatResult::Unknown(_) => {
            let g = w.guard();
            for _ in 0..SAMPLES_PER_WORD {
                let xi = Valuation::from_markers((0..w.length()).map(|_| random_value(rng)));
                if !matches!(eval_guard(&g, &xi, th), Ok(true)) {
                    continue;
                }
                let d = data_word(w, &xi);
                if accepts(this, &d, th) && !accepts(other, &d, th) {
                    return Outcome::Counterexample(d);
                }
            }
            Outcome::Sampled
        }
    }
}

/// Compares the data languages up to `depth`: for every run of one side,
/// the conjunction of its guard with the negated guards of the other side's
/// runs over the same symbols must be unsatisfiable.
pub fn data_equivalence(a: &RegisterAutomaton, b: &RegisterAutomaton, depth: usize, th: &dyn Theory) -> Verdict {
    let (ea, eb) = (enumerate_symbolic(a, depth, th), enumerate_symbolic(b, depth, th));
    let (sa, sb) = (by_symbols(&ea), by_symbols(&eb));
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut sampled = 0;
    let mut unknown = None;
    for (this, other, index, side) in [(a, b, &sb, Side::Left), (b, a, &sa, Side::Right)] {
        let words = if side == Side::Left { &sa } else { &sb };
        let mut ordered: Vec<&SymbolicWord> = words.values().flatten().copied().collect();
        ordered.sort_by(|x, y| (x.length(), *x).cmp(&(y.length(), *y)));
        for w in ordered {
            let others = index.get(&w.symbols()).map(Vec::as_slice).unwrap_or(&[]);
            match covered(w, others, this, other, &mut rng, th) {
                Outcome::Covered => {}
                Outcome::Sampled => sampled += 1,
                Outcome::Counterexample(d) => {
                    return Verdict::Counterexample { accepted_by: side, word: w.clone(), data: Some(d) }
                }
                Outcome::Unknown(why) => {
                    unknown.get_or_insert(why);
                }
            }
        }
    }
    match unknown {
        Some(why) => Verdict::Unknown(why),
        None => Verdict::Equal { sampled },
    }
}
