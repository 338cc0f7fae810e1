use std::collections::BTreeSet;

use super::{AutomatonError, RegisterAutomaton, Transition};
use crate::guards::{is_identifier, parse_guard, parse_variable, Guard, Renaming};

fn parse_error(line: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Parse { line, message: message.into() }
}

/// Reads the line-oriented automaton format:
///
/// ```text
/// alphabet: a b
/// registers: x
/// initial: q0
/// locations: q0 q1        # optional, otherwise inferred
/// q0 --a[ x <= p ]{ x:=p }--> q1
/// ```
///
/// `[...]` defaults to `true` and `{...}` to the empty assignment.
pub fn parse_automaton(text: &str) -> Result<RegisterAutomaton, AutomatonError> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut registers: Vec<String> = Vec::new();
    let mut initial: Option<String> = None;
    let mut locations: BTreeSet<String> = BTreeSet::new();
    let mut transitions = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if line.contains("-->") {
            transitions.push(parse_transition(line, line_no)?);
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(parse_error(line_no, format!("cannot read {line:?}")));
        };
        let words: Vec<String> = value.split_whitespace().map(str::to_string).collect();
        for w in &words {
            if !is_name(w) {
                return Err(parse_error(line_no, format!("invalid name {w:?}")));
            }
        }
        match key.trim() {
            "alphabet" => alphabet = Some(words),
            "registers" => {
                for r in &words {
                    match parse_variable(r) {
                        Ok(v) if v.register_name().is_some() => {}
                        _ => return Err(parse_error(line_no, format!("{r:?} cannot name a register"))),
                    }
                }
                registers = words;
            }
            "initial" => match words.as_slice() {
                [q] => initial = Some(q.clone()),
                _ => return Err(parse_error(line_no, "expected exactly one initial location")),
            },
            "locations" => locations.extend(words),
            other => return Err(parse_error(line_no, format!("unknown header {other:?}"))),
        }
    }

    let alphabet = alphabet.ok_or_else(|| parse_error(0, "missing alphabet header"))?;
    let initial = initial.ok_or_else(|| parse_error(0, "missing initial header"))?;
    for t in &transitions {
        locations.insert(t.source.clone());
        locations.insert(t.target.clone());
    }
    RegisterAutomaton::new(alphabet, locations, initial, registers, transitions)
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

fn parse_transition(line: &str, line_no: usize) -> Result<Transition, AutomatonError> {
    let err = |m: &str| parse_error(line_no, m.to_string());
    let (source, rest) = line.split_once("--").ok_or_else(|| err("expected '--'"))?;
    let (body, target) = rest.rsplit_once("-->").ok_or_else(|| err("expected '-->'"))?;
    let (source, target) = (source.trim(), target.trim());
    if !is_name(source) || !is_name(target) {
        return Err(err("invalid location name"));
    }
    let body = body.trim();
    let sym_end = body.find(['[', '{']).unwrap_or(body.len());
    let symbol = body[..sym_end].trim();
    if !is_identifier(symbol) {
        return Err(parse_error(line_no, format!("invalid input symbol {symbol:?}")));
    }
    let mut rest = body[sym_end..].trim();

    let mut guard = Guard::True;
    if let Some(inner) = rest.strip_prefix('[') {
        let close = inner.find(']').ok_or_else(|| err("unclosed '['"))?;
        guard = parse_guard(&inner[..close]).map_err(|e| parse_error(line_no, format!("guard: {e}")))?;
        rest = inner[close + 1..].trim();
    }
    let mut assignment = Renaming::new();
    if let Some(inner) = rest.strip_prefix('{') {
        let close = inner.find('}').ok_or_else(|| err("unclosed '{'"))?;
        for item in inner[..close].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (x, y) = item.split_once(":=").ok_or_else(|| err("assignments look like x:=p"))?;
            let x = parse_variable(x).map_err(|e| parse_error(line_no, e.to_string()))?;
            let y = parse_variable(y).map_err(|e| parse_error(line_no, e.to_string()))?;
            if assignment.insert(x.clone(), y).is_some() {
                return Err(parse_error(line_no, format!("{x} assigned twice")));
            }
        }
        rest = inner[close + 1..].trim();
    }
    if !rest.is_empty() {
        return Err(parse_error(line_no, format!("unexpected {rest:?}")));
    }
    Ok(Transition::new(source, symbol, guard, assignment, target))
}

/// Renders an automaton in the format read by [`parse_automaton`].
pub fn print_automaton(a: &RegisterAutomaton) -> String {
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("alphabet: {}\n", join(a.alphabet())));
    out.push_str(&format!("registers: {}\n", join(a.registers())));
    out.push_str(&format!("initial: {}\n", a.initial()));
    out.push_str(&format!("locations: {}\n", join(a.locations())));
    for t in a.transitions() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        # two-location toy
        alphabet: a b
        registers: x y
        initial: q0
        q0 --a{ x:=p }--> q1
        q1 --b[ x < p && p != y ]{ y:=x, x:=p }--> q0
        q1 --a--> q1
    ";

    #[test]
    fn reads_defaults_and_headers() {
        let a = parse_automaton(SAMPLE).unwrap();
        assert_eq!(a.locations().len(), 2);
        assert_eq!(a.transitions()[0].guard, Guard::True);
        assert!(a.transitions()[2].assignment.is_empty());
        assert_eq!(a.transitions()[1].assignment.len(), 2);
    }

    #[test]
    fn print_then_parse_is_identity() {
        let a = parse_automaton(SAMPLE).unwrap();
        let printed = print_automaton(&a);
        assert_eq!(parse_automaton(&printed).unwrap(), a);
        assert!(printed.contains("q1 --b[ x < p && !(p = y) ]{ x:=p, y:=x }--> q0"), "{printed}");
    }

    #[test]
    fn rejects_bad_input() {
        let missing = "registers: x\ninitial: q0\n";
        assert!(matches!(parse_automaton(missing), Err(AutomatonError::Parse { .. })));
        let unknown_reg = "alphabet: a\nregisters: x\ninitial: q0\nq0 --a[ y < p ]--> q0\n";
        assert!(matches!(parse_automaton(unknown_reg), Err(AutomatonError::UnknownVariable { .. })));
        let not_injective = "alphabet: a\nregisters: x y\ninitial: q0\nq0 --a{ x:=p, y:=p }--> q0\n";
        assert!(matches!(parse_automaton(not_injective), Err(AutomatonError::NotInjective { .. })));
        let bad_symbol = "alphabet: a\nregisters:\ninitial: q0\nq0 --b--> q0\n";
        assert!(matches!(parse_automaton(bad_symbol), Err(AutomatonError::UnknownSymbol { .. })));
    }
}
