use std::fs;
use std::path::Path;
use std::process::Command;

use ra_core::automaton::{parse_automaton, run_word, DataWord};
use ra_core::catalog::load;
use ra_core::guards::RationalTheory;
use ra_core::nerode::{parse_presentation, parse_sample};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ra(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_ra")).args(args).output().expect("ra runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQUARES: &str = "alphabet: a\nregisters: x\ninitial: q0\nlocations: q0 q1 q2\n\
                       q0 --a[ true ]{ x:=p }--> q1\n";

fn squares(dir: &Path, name: &str, guard: &str) -> String {
    let file = dir.join(name);
    fs::write(&file, format!("{SQUARES}q1 --a[ {guard} ]{{}}--> q2\n")).unwrap();
    path(&file).to_string()
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ra(&[]).code, 3);
    assert_eq!(ra(&["frobnicate"]).code, 3);
    assert_eq!(ra(&["enumerate", "@ordered"]).code, 3);
    assert_eq!(ra(&["--theory", "z3", "list"]).code, 3);
    assert_eq!(ra(&["equiv", "@split", "@unsplit", "--mode", "both", "--depth", "1"]).code, 3);
    assert_eq!(ra(&["gen-an", "--n", "0"]).code, 3);
    assert_eq!(ra(&["--help"]).code, 0);
}

#[test]
fn parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ra");
    fs::write(&bad, "alphabet: a\ninitial: q0\nlocations: q0\nq0 --a[ p < ]{}--> q0\n").unwrap();
    let out = ra(&["check", path(&bad)]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);

    assert_eq!(ra(&["check", path(&dir.path().join("missing.ra"))]).code, 3);
    assert_eq!(ra(&["check", "@missing"]).code, 3);
    assert_eq!(ra(&["run", "@ordered", "a(1) a("]).code, 3);
    assert_eq!(ra(&["symbolic", "@ordered", "a [v1 <"]).code, 3);
    assert_eq!(ra(&["export-smt", "x <"]).code, 3);

    let sample = dir.path().join("sample.txt");
    fs::write(&sample, "a [true]\n").unwrap();
    assert_eq!(ra(&["check-regular", path(&sample), path(&sample)]).code, 3);
}

#[test]
fn check_reports_determinism_and_the_offending_transition() {
    let out = ra(&["check", "@nondeterministic"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("determinism violation: transitions 0 and 1"), "{}", out.stdout);

    let out = ra(&["check", "@ordered_unsafe"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("transition 0 (q0 --a[ x <= p ]{ x:=p }--> q1)"), "{}", out.stdout);

    let out = ra(&["check", "@controller", "--bound", "4"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.ends_with("ok\n"));
}

#[test]
fn run_reports_rejection() {
    let out = ra(&["run", "@ordered", "a(1) a(0) a(-1)"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("rejected at symbol 3 (a(-1))"), "{}", out.stdout);
    assert!(out.stdout.contains("run: (q0,∅),(q1,x↦1),(q2,x↦0)"), "{}", out.stdout);

    let out = ra(&["run", "@ordered", ""]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("run: (q0,∅)"));
}

#[test]
fn symbolic_rejections_and_bad_witnesses() {
    let w = "a [true] ; a [v1 <= v2] ; a [v3 < v2] ; a [v3 <= v4]";
    let out = ra(&["symbolic", "@ordered", w, "--witness", "1,0,0,7"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("rejected"), "{}", out.stdout);

    let out = ra(&["symbolic", "@ordered", "a [true] ; a [v2 < v1] ; a [v2 < v3]"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("rejected at step 3"), "{}", out.stdout);

    let out = ra(&["symbolic", "@ordered", w, "--witness", "-1,4,0,7"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("run: (q0,∅),(q1,x↦-1)"), "{}", out.stdout);
}

#[test]
fn enumerate_lists_words_by_length() {
    let out = ra(&["enumerate", "@ordered", "--depth", "2"]);
    assert_eq!(out.code, 0);
    assert_eq!(
        out.stdout,
        "ε\na [true]\na [true] ; a [v2 < v1]\na [true] ; a [v1 <= v2]\n4 words, 0 undetermined\n"
    );
}

#[test]
fn extracted_files_feed_check_and_synthesis() {
    let dir = tempfile::tempdir().unwrap();
    let out = ra(&["extract", "@ordered", "--depth", "3", "--out-dir", path(dir.path())]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("3 location, 4 transition, 1 register classes"), "{}", out.stdout);
    let (s, p) = (dir.path().join("sample.txt"), dir.path().join("presentation.txt"));

    let out = ra(&["check-regular", path(&s), path(&p)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = ra(&["check-regular", path(&s), path(&p), "--conditions", "4,10"]);
    assert_eq!(out.code, 0);
    assert_eq!(ra(&["check-regular", path(&s), path(&p), "--conditions", "12"]).code, 3);

    let out = ra(&["synthesize", path(&s), path(&p)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let synthesized = dir.path().join("synth.ra");
    fs::write(&synthesized, &out.stdout).unwrap();
    let out = ra(&["equiv", "@ordered", path(&synthesized), "--depth", "3"]);
    assert_eq!(out.code, 0, "{}", out.stdout);

    let stdout = ra(&["extract", "@ordered", "--depth", "3"]).stdout;
    assert!(stdout.starts_with(&fs::read_to_string(&s).unwrap()));
}

#[test]
fn synthesis_refuses_violating_presentations() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("sample.txt");
    let p = dir.path().join("presentation.txt");
    fs::write(&s, "depth: 1\nε\na [v1 = 1]\na [v1 = 2]\n").unwrap();
    fs::write(&p, "[loc]\n0 -> 0\n1 -> 1\n2 -> 1\n[trans]\n1 -> 0\n2 -> 0\n[reg]\n").unwrap();
    let out = ra(&["check-regular", path(&s), path(&p)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("condition 4 violated"), "{}", out.stdout);
    let out = ra(&["synthesize", path(&s), path(&p)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn pipeline_artifacts_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let out = ra(&["pipeline", "@sign_zero_neg", "--depth", "4", "--out-dir", path(dir.path())]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let th = RationalTheory::linear();
    let s = parse_sample(&fs::read_to_string(dir.path().join("sample.txt")).unwrap(), &th).unwrap();
    parse_presentation(&fs::read_to_string(dir.path().join("presentation.txt")).unwrap(), &s).unwrap();
    let b = parse_automaton(&fs::read_to_string(dir.path().join("synthesized.ra")).unwrap()).unwrap();
    assert_eq!(b.initial(), "q0");
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.starts_with("0 violations"), "{report}");

    let again = tempfile::tempdir().unwrap();
    ra(&["pipeline", "@sign_zero_neg", "--depth", "4", "--out-dir", path(again.path())]);
    for file in ["sample.txt", "presentation.txt", "report.txt", "synthesized.ra"] {
        assert_eq!(
            fs::read_to_string(dir.path().join(file)).unwrap(),
            fs::read_to_string(again.path().join(file)).unwrap(),
            "{file} is not deterministic"
        );
    }
}

#[test]
fn pipeline_at_depth_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ra(&["pipeline", "@controller", "--depth", "0", "--out-dir", path(dir.path())]);
    assert_eq!(out.code, 0);
    let b = parse_automaton(&fs::read_to_string(dir.path().join("synthesized.ra")).unwrap()).unwrap();
    assert_eq!(b.locations().len(), 1);
    assert!(b.transitions().is_empty());
}

#[test]
fn equiv_counterexamples_replay() {
    let out = ra(&["equiv", "@split", "@unsplit", "--mode", "symbolic", "--depth", "1"]);
    assert_eq!(out.code, 1);
    let word = out.stdout.trim().strip_prefix("counterexample (left only): ").unwrap();
    assert_eq!(ra(&["symbolic", "@split", word]).code, 0);
    assert_eq!(ra(&["symbolic", "@unsplit", word]).code, 1);

    let dir = tempfile::tempdir().unwrap();
    let strict = dir.path().join("strict.ra");
    let text = load("ordered").unwrap().to_string().replace("q1 --a[ x <= p ]", "q1 --a[ x < p ]");
    fs::write(&strict, &text).unwrap();
    let out = ra(&["equiv", "@ordered", path(&strict), "--mode", "data", "--depth", "3"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    let data = out.stdout.lines().find_map(|l| l.strip_prefix("data word: ")).unwrap();
    assert_eq!(ra(&["run", "@ordered", data]).code, 0);
    assert_eq!(ra(&["run", path(&strict), data]).code, 1);
    let th = RationalTheory::linear();
    let d = DataWord::parse(data).unwrap();
    assert!(run_word(&load("ordered").unwrap(), &d, &th).unwrap().is_accepted());
}

#[test]
fn equiv_is_reflexive() {
    for name in ["@ordered", "@controller", "@sign_zero_pos", "@split"] {
        for mode in ["symbolic", "data"] {
            let out = ra(&["equiv", name, name, "--mode", mode, "--depth", "3"]);
            assert_eq!(out.code, 0, "{name} {mode}: {}", out.stdout);
        }
    }
}

#[test]
fn sampled_equality_exits_2_unless_a_solver_decides() {
    let dir = tempfile::tempdir().unwrap();
    let a = squares(dir.path(), "a.ra", "x*x < p");
    let b = squares(dir.path(), "b.ra", "x*x < p && p >= 0");
    let out = ra(&["equiv", &a, &b, "--mode", "data", "--depth", "2"]);
    assert_eq!(out.code, 2, "{}", out.stdout);
    assert!(out.stdout.starts_with("equal (sampled"), "{}", out.stdout);

    let out = ra(&["--theory", "external:cat >/dev/null; echo unsat", "equiv", &a, &b, "--mode", "data", "--depth", "2"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn export_smt_and_gen_an() {
    let out = ra(&["export-smt", "x <= p && p < 3"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("(declare-fun x () Real)"));
    assert!(out.stdout.trim_end().ends_with("(check-sat)"));

    let out = ra(&["gen-an", "--n", "2"]);
    assert_eq!(out.code, 0);
    let a = parse_automaton(&out.stdout).unwrap();
    assert_eq!(a.registers().len(), 4);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a2.ra");
    fs::write(&file, &out.stdout).unwrap();
    assert_eq!(ra(&["run", path(&file), "a(1) a(1) a(2) a(2) b(0)"]).code, 0);
    assert_eq!(ra(&["run", path(&file), "a(1) a(1) a(2) a(3) b(0)"]).code, 1);
}

#[test]
fn list_names_every_bundled_automaton() {
    let out = ra(&["list"]);
    assert_eq!(out.code, 0);
    for name in ra_core::catalog::names() {
        assert!(out.stdout.contains(&format!("@{name} ")), "{name}");
    }
}
