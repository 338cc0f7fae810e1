mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ra_core::equiv::Mode;
use ra_core::guards::{ExternalSolver, RationalTheory};

/// Register automata: runs, symbolic traces, Myhill-Nerode relations and
/// bounded equivalence.
///
/// Automaton arguments are file paths, or `@name` for a bundled automaton
/// (`ra list` shows them). Exit status: 0 success or equal, 1 violation or
/// inequivalent, 2 unknown or only sampled, 3 usage or parse error.
#[derive(Parser)]
#[command(name = "ra", version)]
struct Cli {
    /// `linear`, or `external:<command>` to hand undecided queries to an
    /// SMT-LIB solver reading stdin.
    #[arg(long, global = true, default_value = "linear", value_parser = parse_theory)]
    theory: RationalTheory,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled automata.
    List,
    /// Determinism, injectivity and well-formedness checks.
    Check {
        automaton: String,
        /// Also check well-formedness on all symbolic runs shorter than this.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Run a data word such as `a(1) a(4) a(0) a(7)`.
    Run { automaton: String, word: String },
    /// Run a symbolic word such as `a [true] ; a [v1 <= v2]`.
    Symbolic {
        automaton: String,
        word: String,
        /// Values for v1, v2, ... separated by commas; replays the run.
        #[arg(long, allow_hyphen_values = true)]
        witness: Option<String>,
    },
    /// The symbolic language up to a length bound.
    Enumerate {
        automaton: String,
        #[arg(long)]
        depth: usize,
    },
    /// Sample and relation presentation induced by an automaton.
    Extract {
        automaton: String,
        #[arg(long)]
        depth: usize,
        /// Write `sample.txt` and `presentation.txt` here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check the regularity conditions on a presentation.
    CheckRegular {
        sample: PathBuf,
        presentation: PathBuf,
        /// Only these conditions, e.g. `4,10`.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<u8>,
    },
    /// Build an automaton from a presentation that passes the conditions.
    Synthesize { sample: PathBuf, presentation: PathBuf },
    /// Bounded equivalence.
    Equiv {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value = "symbolic")]
        mode: ModeArg,
        #[arg(long)]
        depth: usize,
    },
    /// Print a guard as an SMT-LIB satisfiability query.
    ExportSmt { guard: String },
    /// The succinct equality-pattern automaton with 2n registers.
    GenAn {
        #[arg(long)]
        n: usize,
    },
    /// Extract, check, synthesize and compare, writing every artifact.
    Pipeline {
        automaton: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Symbolic,
    Data,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Symbolic => Mode::Symbolic,
            ModeArg::Data => Mode::Data,
        }
    }
}

fn parse_theory(s: &str) -> Result<RationalTheory, String> {
    match s.split_once(':') {
        None if s == "linear" => Ok(RationalTheory::linear()),
        Some(("external", cmd)) if !cmd.trim().is_empty() => {
            Ok(RationalTheory::with_external(ExternalSolver::new(cmd.trim())))
        }
        _ => Err(format!("expected `linear` or `external:<command>`, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::USAGE } else { 0 });
        }
    };
    let th = &cli.theory;
    let result = match cli.command {
        Command::List => commands::list(),
        Command::Check { automaton, bound } => commands::check(&automaton, bound, th),
        Command::Run { automaton, word } => commands::run(&automaton, &word, th),
        Command::Symbolic { automaton, word, witness } => commands::symbolic(&automaton, &word, witness.as_deref(), th),
        Command::Enumerate { automaton, depth } => commands::enumerate(&automaton, depth, th),
        Command::Extract { automaton, depth, out_dir } => commands::extract(&automaton, depth, out_dir.as_deref(), th),
        Command::CheckRegular { sample, presentation, conditions } => {
            commands::check_regular(&sample, &presentation, &conditions, th)
        }
        Command::Synthesize { sample, presentation } => commands::synthesize(&sample, &presentation, th),
        Command::Equiv { left, right, mode, depth } => commands::equiv(&left, &right, mode.into(), depth, th),
        Command::ExportSmt { guard } => commands::export_smt(&guard),
        Command::GenAn { n } => commands::gen_an(n),
        Command::Pipeline { automaton, depth, out_dir } => commands::pipeline(&automaton, depth, &out_dir, th),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
