use std::fmt;

use thiserror::Error;

use super::RegisterAutomaton;
use crate::guards::{eval_guard, GuardError, Theory, Valuation, Variable};
use crate::value::{format_value, parse_value, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataSymbol {
    pub symbol: String,
    pub value: Value,
}

impl DataSymbol {
    pub fn new(symbol: impl Into<String>, value: Value) -> DataSymbol {
        DataSymbol { symbol: symbol.into(), value }
    }
}

impl fmt::Display for DataSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol, format_value(&self.value))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataWord(pub Vec<DataSymbol>);

impl DataWord {
    /// Reads `a(1) a(4) b(-1/2)`. A comma inside the parentheses is a decimal
    /// separator, so `gain(0,5)` is `gain(0.5)`.
    pub fn parse(text: &str) -> Result<DataWord, String> {
        let mut out = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| format!("expected '(' in {rest:?}"))?;
            let close = rest.find(')').ok_or_else(|| format!("expected ')' in {rest:?}"))?;
            if close < open {
                return Err(format!("unbalanced parentheses in {rest:?}"));
            }
            let symbol = rest[..open].trim();
            if symbol.is_empty() || !symbol.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(format!("invalid input symbol {symbol:?}"));
            }
            let literal = rest[open + 1..close].trim().replace(',', ".");
            let value = parse_value(&literal).ok_or_else(|| format!("invalid data value {literal:?}"))?;
            out.push(DataSymbol::new(symbol, value));
            rest = rest[close + 1..].trim_start();
        }
        Ok(DataWord(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub location: String,
    pub valuation: Valuation,
}

impl Configuration {
    pub fn initial(a: &RegisterAutomaton) -> Configuration {
        Configuration { location: a.initial().to_string(), valuation: Valuation::new() }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.location, self.valuation)
    }
}

/// `configurations[i]` is reached after `word.0[..i]`; `transitions[i]` is the
/// index of the transition consuming `word.0[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub configurations: Vec<Configuration>,
    pub word: DataWord,
    pub transitions: Vec<usize>,
}

impl Run {
    pub fn empty(a: &RegisterAutomaton) -> Run {
        Run { configurations: vec![Configuration::initial(a)], word: DataWord::default(), transitions: Vec::new() }
    }

    pub fn last(&self) -> &Configuration {
        self.configurations.last().expect("runs start with a configuration")
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.configurations.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("transition {transition}: {source}")]
    Guard { transition: usize, source: GuardError },
    #[error("transitions {0} and {1} are both enabled")]
    Nondeterministic(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Accepted(Run),
    /// No transition was enabled for `word.0[stuck_at]`; `prefix` is the run
    /// over the preceding symbols.
    Rejected { stuck_at: usize, prefix: Run },
}

impl RunOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, RunOutcome::Accepted(_))
    }
}

/// One step from `c` on `s`: `ι = ξ ∪ {p ↦ d}` must satisfy the guard and the
/// successor valuation is `ι ∘ ϱ`.
pub fn step(
    a: &RegisterAutomaton,
    c: &Configuration,
    s: &DataSymbol,
    th: &dyn Theory,
) -> Result<Option<(Configuration, usize)>, RunError> {
    let iota = c.valuation.clone().with(Variable::Param, s.value.clone());
    let mut enabled: Option<(Configuration, usize)> = None;
    for (index, t) in a.outgoing(&c.location, &s.symbol) {
        let holds =
            eval_guard(&t.guard, &iota, th).map_err(|source| RunError::Guard { transition: index, source })?;
        if !holds {
            continue;
        }
        if let Some((_, first)) = &enabled {
            return Err(RunError::Nondeterministic(*first, index));
        }
        let next = Configuration { location: t.target.clone(), valuation: iota.compose(&t.assignment) };
        enabled = Some((next, index));
    }
    Ok(enabled)
}

pub fn run_word(a: &RegisterAutomaton, w: &DataWord, th: &dyn Theory) -> Result<RunOutcome, RunError> {
    let mut run = Run::empty(a);
    for (i, s) in w.0.iter().enumerate() {
        match step(a, run.last(), s, th)? {
            Some((next, index)) => {
                run.configurations.push(next);
                run.transitions.push(index);
                run.word.0.push(s.clone());
            }
            None => return Ok(RunOutcome::Rejected { stuck_at: i, prefix: run }),
        }
    }
    Ok(RunOutcome::Accepted(run))
}
