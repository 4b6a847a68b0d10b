use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand};
use rasm::asm::{OpRegistry, Reserve, State};
use rasm::conformance::{self, CheckReport};
use rasm::frontend::{format_step, parse_state, parse_tree, print_state, StateDocError};
use rasm::reflection::{step, tree_diff_theta, StepError};
use rasm::tree::Tree;
use rasm::Value;

const EXIT_EVAL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_MALFORMED: u8 = 3;
const EXIT_POSTULATE: u8 = 4;
const EXIT_SHRUNK: u8 = 5;
const EXIT_STRICT: u8 = 6;

#[derive(Parser)]
#[command(name = "rasm", version, about = "Run and inspect reflective abstract state machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine from a state document.
    Run(RunArgs),
    /// Print a tree-algebra term taking one program tree to another.
    Diff { old: PathBuf, new: PathBuf },
    /// Check the postulates on the runs of one or more state documents.
    Check(CheckArgs),
    /// Reprint a state document in canonical form.
    Fmt {
        file: PathBuf,
        /// Overwrite the file instead of printing.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Steps {
    Count(usize),
    Fixpoint,
}

impl FromStr for Steps {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "fixpoint" {
            return Ok(Steps::Fixpoint);
        }
        s.parse().map(Steps::Count).map_err(|_| format!("expected a number or `fixpoint`, got `{s}`"))
    }
}

#[derive(Args)]
struct RunArgs {
    state: PathBuf,
    /// Number of steps, or `fixpoint`.
    #[arg(long, default_value = "1")]
    steps: Steps,
    /// Write a step trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Check the postulates after every step.
    #[arg(long)]
    check_postulates: bool,
    /// Selects the reserve namespace and the checker's random choices.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat an inconsistent update set as an error.
    #[arg(long)]
    strict: bool,
    /// Bound on the number of steps when running to a fixpoint.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    /// Write the final state here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(required = true)]
    states: Vec<PathBuf>,
    /// Length of the run explored from each state.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Random bijections tried per state document.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// State pairs built per state document for bounded exploration.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also require every given state to hold the same program.
    #[arg(long)]
    initial_agreement: bool,
    /// Write a canonical text report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure { code, error: error.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: EXIT_EVAL, error }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Diff { old, new } => diff(&old, &new),
        Command::Check(args) => check(args),
        Command::Fmt { file, write } => fmt(&file, write),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::from)
}

fn load_state(path: &Path) -> Result<State, Failure> {
    let src = read(path)?;
    parse_state(&src).map_err(|e| {
        let code = match e {
            StateDocError::Malformed(_) => EXIT_MALFORMED,
            _ => EXIT_PARSE,
        };
        Failure::new(code, anyhow!(e).context(path.display().to_string()))
    })
}

fn step_failure(e: StepError) -> Failure {
    let code = match e {
        StepError::Malformed(_) => EXIT_MALFORMED,
        StepError::SignatureShrunk(_) => EXIT_POSTULATE,
        _ => EXIT_EVAL,
    };
    Failure::new(code, e)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::from)
}

fn postulate_reports(prev: &State, next: &State, seed: u64, k: usize) -> Vec<CheckReport> {
    let seed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
    vec![
        conformance::check_isomorphism_closure(prev, 5, seed),
        conformance::check_signature_monotonicity(&[prev.clone(), next.clone()]),
        conformance::check_bounded_exploration(&conformance::exploration_pairs(&[prev.clone()], 4, seed)),
    ]
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut s = load_state(&args.state)?;
    if let Some(seed) = args.seed {
        s.reserve = Reserve { next: s.reserve.next, ..Reserve::for_seed(seed) };
    }
    let ops = OpRegistry::default();
    let limit = match args.steps {
        Steps::Count(n) => n as u64,
        Steps::Fixpoint => args.max_steps,
    };
    let mut trace = String::new();
    let mut reached_fixpoint = false;
    for k in 1..=limit {
        let report = step(&s, &ops).map_err(step_failure)?;
        trace.push_str(&format_step(k as usize, &report));
        if !report.consistent {
            let clashes: Vec<String> = report.update_set.clashes.iter().map(|l| l.to_string()).collect();
            if args.strict {
                if let Some(path) = &args.trace {
                    write_file(path, &trace)?;
                }
                return Err(Failure::new(
                    EXIT_STRICT,
                    anyhow!("step {k}: inconsistent update set on {}", clashes.join(", ")),
                ));
            }
            eprintln!("step {k}: inconsistent update set on {}; state unchanged", clashes.join(", "));
        }
        if args.check_postulates {
            for r in postulate_reports(&s, &report.next, args.seed.unwrap_or(0), k as usize) {
                if !r.passed() {
                    if let Some(path) = &args.trace {
                        write_file(path, &trace)?;
                    }
                    return Err(Failure::new(EXIT_POSTULATE, anyhow!("step {k}: {r}")));
                }
            }
        }
        let fix = report.next.same_content(&s);
        s = report.next;
        if args.steps == Steps::Fixpoint && fix {
            reached_fixpoint = true;
            break;
        }
    }
    if args.steps == Steps::Fixpoint && !reached_fixpoint {
        eprintln!("no fixpoint within {} steps", args.max_steps);
    }
    if let Some(path) = &args.trace {
        write_file(path, &trace)?;
    }
    let text = print_state(&s);
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A program tree written directly (`#pgm⟨…⟩` or `pgm⟨…⟩`) or the `pgm` of
/// a state document.
fn load_program(path: &Path) -> Result<Tree, Failure> {
    let src = read(path)?;
    let trimmed = src.trim();
    let body = trimmed.strip_prefix('#').unwrap_or(trimmed);
    if let Ok(t) = parse_tree(body) {
        return Ok(t);
    }
    let s = load_state(path)?;
    match s.pgm() {
        Value::Tree(t) => Ok(t),
        _ => Err(Failure::new(EXIT_MALFORMED, anyhow!("{}: pgm is not a tree", path.display()))),
    }
}

fn diff(old: &Path, new: &Path) -> Result<(), Failure> {
    let a = load_program(old)?;
    let b = load_program(new)?;
    let theta = tree_diff_theta(&a, &b).map_err(|e| match e {
        StepError::SignatureShrunk(_) => Failure::new(EXIT_SHRUNK, e),
        StepError::Malformed(_) => Failure::new(EXIT_MALFORMED, e),
        other => Failure::new(EXIT_EVAL, other),
    })?;
    println!("{theta}");
    let equal = theta.eval_tree(&a).is_ok_and(|t| t == b);
    println!("{}", if equal { "verdict: equal" } else { "verdict: different" });
    if equal {
        Ok(())
    } else {
        Err(Failure::new(EXIT_EVAL, anyhow!("the term does not reproduce the target tree")))
    }
}

fn canonical_report(file: &str, r: &CheckReport, out: &mut String) {
    let _ = writeln!(out, "check {}", r.name);
    let _ = writeln!(out, "file {file}");
    let _ = writeln!(out, "instances {}", r.instances);
    let _ = writeln!(out, "checked {}", r.checked());
    let _ = writeln!(out, "violations {}", r.violations.len());
    for v in &r.violations {
        let _ = writeln!(out, "violation {} {}", v.instance, v.message);
    }
    let _ = writeln!(out, "end");
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let mut states = Vec::new();
    for path in &args.states {
        states.push((path.display().to_string(), load_state(path)?));
    }
    let mut reports: Vec<(String, CheckReport)> = Vec::new();
    for (name, s) in &states {
        for r in conformance::check_demo(s, args.steps, args.trials, args.pairs, args.seed) {
            reports.push((name.clone(), r));
        }
    }
    if args.initial_agreement {
        let inits: Vec<State> = states.iter().map(|(_, s)| s.clone()).collect();
        reports.push(("*".into(), conformance::check_initial_agreement(&inits)));
    }
    reports.sort_by(|a, b| (&a.1.name, &a.0).cmp(&(&b.1.name, &b.0)));
    let mut text = String::new();
    for (file, r) in &reports {
        println!("{file}: {r}");
        canonical_report(file, r, &mut text);
    }
    if let Some(path) = &args.report {
        write_file(path, &text)?;
    }
    let failed = reports.iter().filter(|(_, r)| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::new(EXIT_POSTULATE, anyhow!("{failed} checks reported violations")));
    }
    Ok(())
}

fn fmt(path: &Path, write: bool) -> Result<(), Failure> {
    let s = load_state(path)?;
    let text = print_state(&s);
    if write {
        write_file(path, &text)
    } else {
        print!("{text}");
        Ok(())
    }
}
