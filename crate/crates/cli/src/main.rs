//! `gauss`: solve, trace, verify and check the corpus from the command line.
//!
//! Exit status: 0 on success, 1 when a solve or a check fails, 2 on usage
//! errors (bad flags, unreadable or malformed problem files).

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gauss_core::eliminate::LinearSystem;
use gauss_core::leastsq::{LsqCase, LsqProblem};
use gauss_core::scalar::{round_to, PrecisionSpec, Scalar, ScalarKind};
use gauss_core::workbench::{
    builtin_corpus, load_dir, parse_system, render_tableau, render_vector, run_corpus, run_lsq, run_refined, verify_all,
    LsqMethod, Method, Problem, Run, Style, Trace,
};

#[derive(Parser)]
#[command(name = "gauss", version, about = "Historical Gaussian elimination, exact or at desk precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Partial pivoting (schoolbook, fraction-free and ldu only).
    #[arg(long)]
    pivot: bool,
    /// `exact`, `frac=K` or `sig=K`; defaults to the file's header.
    #[arg(long, value_parser = parse_precision)]
    precision: Option<ScalarKind>,
    /// Rounds of iterative refinement.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve A·x = b with one method.
    Solve(SolveArgs),
    /// Solve and print the working tables.
    Trace {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value = "text", value_parser = parse_style)]
        style: Style,
    },
    /// Least squares through the normal equations.
    Lsq {
        #[arg(long, value_parser = parse_case)]
        case: LsqCase,
        #[arg(long, value_parser = parse_lsq_method)]
        method: LsqMethod,
        #[arg(long, value_parser = parse_precision)]
        precision: Option<ScalarKind>,
        file: PathBuf,
    },
    /// Check every corpus problem against its expected values.
    Corpus {
        #[arg(long)]
        id: Option<String>,
        /// Read the corpus from this directory instead of the built-in copy.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Run every method on a problem and cross-check the results.
    Verify { file: PathBuf },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: gauss_core::Error| e.to_string())
}

fn parse_lsq_method(s: &str) -> Result<LsqMethod, String> {
    s.parse().map_err(|e: gauss_core::Error| e.to_string())
}

fn parse_style(s: &str) -> Result<Style, String> {
    s.parse().map_err(|e: gauss_core::Error| e.to_string())
}

fn parse_case(s: &str) -> Result<LsqCase, String> {
    match s {
        "1" => Ok(LsqCase::Case1),
        "2" => Ok(LsqCase::Case2),
        _ => Err(format!("case must be 1 or 2, not {s:?}")),
    }
}

fn parse_precision(s: &str) -> Result<ScalarKind, String> {
    let text = if s == "exact" { s.to_string() } else { format!("fixed {s}") };
    text.parse().map_err(|e: gauss_core::Error| e.to_string())
}

/// What went wrong, and which exit status it earns.
enum Failure {
    Usage(String),
    Failed(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Usage(m) => {
                eprintln!("gauss: {m}");
                ExitCode::from(2)
            }
            Failure::Failed(m) => {
                eprintln!("gauss: {m}");
                ExitCode::from(1)
            }
        }
    }
}

fn failed(e: gauss_core::Error) -> Failure {
    Failure::Failed(e.to_string())
}

fn read_problem(path: &Path) -> Result<Problem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_linear(args: &SolveArgs) -> Result<LinearSystem, Failure> {
    match read_problem(&args.file)? {
        Problem::Linear(sys) => Ok(match args.precision {
            Some(kind) => sys.with_kind(kind),
            None => sys,
        }),
        Problem::LeastSquares(_) => Err(Failure::Usage(format!(
            "{} is a least-squares problem; use `gauss lsq`",
            args.file.display()
        ))),
    }
}

/// A refined fixed-precision solution is exact; print its values as
/// decimals when they terminate.
fn plain(v: &Scalar) -> String {
    let Scalar::Exact(q) = v else {
        return v.render_plain();
    };
    (1..=40)
        .filter_map(|k| PrecisionSpec::fractional(k).ok())
        .map(|spec| round_to(q, spec))
        .find(|f| &f.to_rational() == q && !q.is_integer())
        .map_or_else(|| v.render_plain(), |f| f.render_plain())
}

fn print_solution(out: &mut String, sys: &LinearSystem, run: &Run) {
    let decimal = sys.kind() != ScalarKind::Exact;
    for (name, v) in sys.names.iter().zip(&run.solution) {
        let text = if decimal { plain(v) } else { v.render_plain() };
        let _ = writeln!(out, "{name} = {text}");
    }
}

fn print_traces(out: &mut String, run: &Run, style: Style) {
    for t in &run.traces {
        match t {
            Trace::Tableau(t) => out.push_str(&render_tableau(t, style)),
            Trace::Text(s) => out.push_str(s),
        }
        out.push('\n');
    }
}

fn solve(out: &mut String, args: &SolveArgs, style: Option<Style>) -> Result<(), Failure> {
    let sys = read_linear(args)?;
    let run = run_refined(&sys, args.method, args.pivot, args.refine).map_err(failed)?;
    if let Some(style) = style {
        print_traces(out, &run, style);
    }
    print_solution(out, &sys, &run);
    Ok(())
}

fn lsq(out: &mut String, case: LsqCase, method: LsqMethod, precision: Option<ScalarKind>, file: &Path) -> Result<(), Failure> {
    let (a, b) = match read_problem(file)? {
        Problem::Linear(sys) => (sys.a, sys.b),
        Problem::LeastSquares(p) => (p.a, p.b),
    };
    let (a, b) = match precision {
        Some(kind) => (a.with_kind(kind), b.iter().map(|v| v.convert(kind)).collect()),
        None => (a, b),
    };
    let p = LsqProblem::new(case, a, b).map_err(|e| Failure::Usage(e.to_string()))?;
    let run = run_lsq(&p, method).map_err(failed)?;
    let _ = writeln!(out, "{}", render_vector(&run.solution));
    Ok(())
}

fn corpus(out: &mut String, id: Option<&str>, dir: Option<&Path>) -> Result<(), Failure> {
    let problems = match dir {
        Some(dir) => load_dir(dir),
        None => builtin_corpus(),
    }
    .map_err(failed)?;
    let outcomes = run_corpus(&problems, id).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut bad = 0;
    for o in &outcomes {
        if o.passed() {
            let _ = writeln!(out, "ok    {:<14} {}", o.id, o.source);
        } else {
            bad += 1;
            let _ = writeln!(out, "FAIL  {:<14} {}", o.id, o.source);
            for f in &o.failures {
                for line in f.lines() {
                    let _ = writeln!(out, "      {line}");
                }
            }
        }
    }
    let _ = writeln!(out, "{} of {} corpus problems pass", outcomes.len() - bad, outcomes.len());
    if bad > 0 {
        return Err(Failure::Failed(format!("{bad} corpus problem(s) failed")));
    }
    Ok(())
}

fn verify(out: &mut String, file: &Path) -> Result<(), Failure> {
    let report = verify_all(&read_problem(file)?);
    out.push_str(&report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Failed("verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match &cli.command {
        Command::Solve(args) => solve(&mut out, args, None),
        Command::Trace { solve: args, style } => solve(&mut out, args, Some(*style)),
        Command::Lsq {
            case,
            method,
            precision,
            file,
        } => lsq(&mut out, *case, *method, *precision, file),
        Command::Corpus { id, dir } => corpus(&mut out, id.as_deref(), dir.as_deref()),
        Command::Verify { file } => verify(&mut out, file),
    };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
