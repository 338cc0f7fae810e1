use std::fs;
use std::path::Path;

use ra_core::automaton::{
    check_well_formed_bounded, check_well_formed_syntactic, parse_automaton, print_automaton, run_word, validate,
    BoundedVerdict, DataWord, RegisterAutomaton, RunOutcome,
};
use ra_core::catalog;
use ra_core::equiv::{equivalence, symbolic_equivalence, Mode, Verdict};
use ra_core::guards::{parse_guard, to_smtlib, Theory, Valuation};
use ra_core::nerode::{
    check_conditions, check_selected, extract_relations, parse_presentation, parse_sample, print_presentation,
    print_sample, synthesize as synthesize_automaton, ConditionReport, LanguageSample, NerodeError,
    RelationPresentation,
};
use ra_core::symbolic::{abstract_run, concretize, enumerate_symbolic, symbolic_run, SymbolicOutcome, SymbolicWord};
use ra_core::value::parse_value;

pub const OK: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const UNKNOWN: u8 = 2;
pub const USAGE: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: USAGE, message: message.into() }
    }

    fn violation(message: impl Into<String>) -> Failure {
        Failure { code: VIOLATION, message: message.into() }
    }
}

impl From<NerodeError> for Failure {
    fn from(e: NerodeError) -> Failure {
        let code = match e {
            NerodeError::SampleParse { .. } | NerodeError::PresentationParse { .. } => USAGE,
            NerodeError::Undetermined { .. } => UNKNOWN,
            _ => VIOLATION,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::violation(format!("{}: {e}", path.display())))
}

/// A file path, or `@name` for a bundled automaton.
fn load_automaton(arg: &str) -> Result<RegisterAutomaton, Failure> {
    let (origin, text) = match arg.strip_prefix('@') {
        Some(name) => {
            let text = catalog::source(name).ok_or_else(|| {
                let known: Vec<&str> = catalog::names().collect();
                Failure::usage(format!("no bundled automaton {name:?} (known: {})", known.join(", ")))
            })?;
            (arg.to_string(), text.to_string())
        }
        None => (arg.to_string(), read(Path::new(arg))?),
    };
    parse_automaton(&text).map_err(|e| Failure::usage(format!("{origin}: {e}")))
}

fn load_sample(path: &Path, th: &dyn Theory) -> Result<LanguageSample, Failure> {
    Ok(parse_sample(&read(path)?, th)?)
}

fn load_pair(sample: &Path, pres: &Path, th: &dyn Theory) -> Result<(LanguageSample, RelationPresentation), Failure> {
    let s = load_sample(sample, th)?;
    let p = parse_presentation(&read(pres)?, &s)?;
    Ok((s, p))
}

fn report_code(r: &ConditionReport) -> u8 {
    if !r.violations.is_empty() {
        VIOLATION
    } else if !r.unknowns.is_empty() {
        UNKNOWN
    } else {
        OK
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Equal { sampled: 0 } => OK,
        Verdict::Equal { .. } | Verdict::Unknown(_) => UNKNOWN,
        Verdict::Counterexample { .. } => VIOLATION,
    }
}

pub fn list() -> Outcome {
    for name in catalog::names() {
        let first = catalog::source(name).and_then(|s| s.lines().next()).unwrap_or("");
        println!("@{name:<18} {}", first.trim_start_matches('#').trim());
    }
    Ok(OK)
}

pub fn check(arg: &str, bound: Option<usize>, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    let mut code = OK;
    let v = validate(&a, th);
    print!("{v}");
    if !v.is_ok() {
        code = VIOLATION;
    } else if !v.warnings.is_empty() {
        code = UNKNOWN;
    }
    let s = check_well_formed_syntactic(&a);
    for q in &s.unreachable {
        println!("unreachable location {q}");
    }
    for &i in &s.offending {
        println!("syntactic: transition {i} ({}) may read an undefined register", a.transition(i));
    }
    if !s.well_formed {
        code = VIOLATION;
    }
    if let Some(k) = bound {
        match check_well_formed_bounded(&a, k, th) {
            BoundedVerdict::Ok => println!("bounded (depth {k}): well-formed"),
            BoundedVerdict::Counterexample { run, transition, missing } => {
                let missing: Vec<String> = missing.iter().map(ToString::to_string).collect();
                println!(
                    "bounded (depth {k}): transition {transition} ({}) reads undefined {{{}}} after {}",
                    a.transition(transition),
                    missing.join(", "),
                    run.word()
                );
                code = VIOLATION;
            }
            BoundedVerdict::Unknown(why) => {
                println!("bounded (depth {k}): unknown: {why}");
                if code == OK {
                    code = UNKNOWN;
                }
            }
        }
    }
    println!("{}", if code == OK { "ok" } else if code == VIOLATION { "violation" } else { "unknown" });
    Ok(code)
}

pub fn run(arg: &str, word: &str, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    let w = DataWord::parse(word).map_err(|e| Failure::usage(format!("data word: {e}")))?;
    match run_word(&a, &w, th).map_err(|e| Failure::violation(e.to_string()))? {
        RunOutcome::Accepted(r) => {
            println!("accepted");
            println!("run: {r}");
            let (sr, _) = abstract_run(&a, &r);
            println!("strace: {}", sr.word());
            Ok(OK)
        }
        RunOutcome::Rejected { stuck_at, prefix } => {
            println!("rejected at symbol {} ({})", stuck_at + 1, w.0[stuck_at]);
            println!("run: {prefix}");
            Ok(VIOLATION)
        }
    }
}

fn parse_witness(text: &str) -> Result<Valuation, Failure> {
    let values = text
        .split(',')
        .map(|s| parse_value(s).ok_or_else(|| Failure::usage(format!("witness: bad value {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Valuation::from_markers(values))
}

pub fn symbolic(arg: &str, word: &str, witness: Option<&str>, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    let w = SymbolicWord::parse(word).map_err(|e| Failure::usage(format!("symbolic word: {e}")))?;
    let xi = witness.map(parse_witness).transpose()?;
    match symbolic_run(&a, &w, th) {
        SymbolicOutcome::Accepted(run) => {
            println!("accepted");
            println!("locations: {}", run.locations.join(","));
            println!("registers: {}", run.final_zeta());
            let Some(xi) = xi else { return Ok(OK) };
            match concretize(&run, &xi, th) {
                Ok(r) => {
                    println!("witness {xi} satisfies {}", w.guard());
                    println!("run: {r}");
                    Ok(OK)
                }
                Err(e) => {
                    println!("witness {xi} rejected: {e}");
                    Ok(VIOLATION)
                }
            }
        }
        SymbolicOutcome::Rejected { index, reason } => {
            println!("rejected at step {index}: {reason:?}");
            Ok(VIOLATION)
        }
        SymbolicOutcome::Unknown { index, reason } => {
            println!("unknown at step {index}: {reason}");
            Ok(UNKNOWN)
        }
    }
}

pub fn enumerate(arg: &str, depth: usize, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    let e = enumerate_symbolic(&a, depth, th);
    let mut words: Vec<(&SymbolicWord, bool)> =
        e.accepted.keys().map(|w| (w, true)).chain(e.undetermined.keys().map(|w| (w, false))).collect();
    words.sort_by(|x, y| (x.0.length(), x.0).cmp(&(y.0.length(), y.0)));
    for (w, decided) in &words {
        let w = if w.is_empty() { "ε".to_string() } else { w.to_string() };
        println!("{}{w}", if *decided { "" } else { "? " });
    }
    println!("{} words, {} undetermined", e.accepted.len(), e.undetermined.len());
    Ok(if e.is_complete() { OK } else { UNKNOWN })
}

pub fn extract(arg: &str, depth: usize, out: Option<&Path>, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    let (s, p) = extract_relations(&a, depth, th)?;
    let (sample, pres) = (print_sample(&s), print_presentation(&s, &p));
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::violation(format!("{}: {e}", dir.display())))?;
            write(&dir.join("sample.txt"), &sample)?;
            write(&dir.join("presentation.txt"), &pres)?;
            println!(
                "{} words, {} location, {} transition, {} register classes",
                s.len(),
                p.location_classes().len(),
                p.transition_classes().len(),
                p.register_classes().len()
            );
        }
        None => print!("{sample}\n{pres}"),
    }
    Ok(OK)
}

pub fn check_regular(sample: &Path, pres: &Path, conditions: &[u8], th: &dyn Theory) -> Outcome {
    if let Some(c) = conditions.iter().find(|c| !(1..=11).contains(*c)) {
        return Err(Failure::usage(format!("no condition {c}; conditions are numbered 1 to 11")));
    }
    let (s, p) = load_pair(sample, pres, th)?;
    let r = if conditions.is_empty() { check_conditions(&s, &p, th) } else { check_selected(&s, &p, th, conditions) };
    print!("{r}");
    Ok(report_code(&r))
}

pub fn synthesize(sample: &Path, pres: &Path, th: &dyn Theory) -> Outcome {
    let (s, p) = load_pair(sample, pres, th)?;
    let r = check_conditions(&s, &p, th);
    if !r.violations.is_empty() {
        eprint!("{r}");
        return Err(Failure::violation("the presentation violates the regularity conditions"));
    }
    for u in &r.unknowns {
        eprintln!("warning: unknown: {u}");
    }
    let a = synthesize_automaton(&s, &p)?;
    print!("{}", print_automaton(&a));
    Ok(report_code(&r))
}

pub fn equiv(left: &str, right: &str, mode: Mode, depth: usize, th: &dyn Theory) -> Outcome {
    let (a, b) = (load_automaton(left)?, load_automaton(right)?);
    let v = equivalence(&a, &b, mode, depth, th);
    println!("{v}");
    Ok(verdict_code(&v))
}

pub fn export_smt(guard: &str) -> Outcome {
    let g = parse_guard(guard).map_err(|e| Failure::usage(format!("guard: {e}")))?;
    print!("{}", to_smtlib(&g));
    Ok(OK)
}

pub fn gen_an(n: usize) -> Outcome {
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    print!("{}", print_automaton(&catalog::succinct_family(n)));
    Ok(OK)
}

pub fn pipeline(arg: &str, depth: usize, out: &Path, th: &dyn Theory) -> Outcome {
    let a = load_automaton(arg)?;
    fs::create_dir_all(out).map_err(|e| Failure::violation(format!("{}: {e}", out.display())))?;
    let (s, p) = extract_relations(&a, depth, th)?;
    let (sample_path, pres_path) = (out.join("sample.txt"), out.join("presentation.txt"));
    write(&sample_path, &print_sample(&s))?;
    write(&pres_path, &print_presentation(&s, &p))?;
    let (s2, p2) = load_pair(&sample_path, &pres_path, th)?;
    if (&s2, &p2) != (&s, &p) {
        return Err(Failure::violation("sample or presentation does not re-parse to itself"));
    }
    println!(
        "extracted {} words: {} location, {} transition, {} register classes",
        s.len(),
        p.location_classes().len(),
        p.transition_classes().len(),
        p.register_classes().len()
    );

    let r = check_conditions(&s, &p, th);
    write(&out.join("report.txt"), &r.to_string())?;
    print!("conditions: {r}");
    if !r.violations.is_empty() {
        return Ok(VIOLATION);
    }

    let b = synthesize_automaton(&s, &p)?;
    let text = print_automaton(&b);
    let synth_path = out.join("synthesized.ra");
    write(&synth_path, &text)?;
    match parse_automaton(&read(&synth_path)?) {
        Ok(b2) if b2 == b => {}
        _ => return Err(Failure::violation("synthesized automaton does not re-parse to itself")),
    }
    println!(
        "synthesized {} locations, {} transitions, {} registers",
        b.locations().len(),
        b.transitions().len(),
        b.registers().len()
    );

    let v = symbolic_equivalence(&a, &b, depth, th);
    println!("round trip at depth {depth}: {v}");
    Ok(report_code(&r).max(verdict_code(&v)))
}
