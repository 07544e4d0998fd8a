//! Historical problems shipped as problem files, each with its expected
//! solution and a few landmark rows of the historical working.
//!
//! Extra directives, on top of those the problem format already knows:
//!
//! ```text
//! #@ id nine-chapters
//! #@ source Nine Chapters, chapter 8, problem 1 (grain from three grades)
//! #@ expected 37/4 17/4 11/4
//! #@ provenance printed
//! #@ method dwyer
//! #@ script 3*2 - 1; 3*3 - 2*1
//! #@ check ff-row 4 | 0 11 2 54
//! ```
//!
//! `expected` may also be `inconsistent ROW` or `singular`. `method` names
//! the method whose solution is compared in fixed arithmetic (every method
//! is compared in exact arithmetic). Each `check` line is a landmark: a kind,
//! its arguments, then `|` and the expected value.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::eliminate::{
    closed_form_aryabhata, closed_form_diophantus, fraction_free_solve, replay_combinations, rolle_solve, schoolbook_solve,
    Derivation, LinearSystem,
};
use crate::error::{Error, Result};
use crate::ldu::ldu_decompose;
use crate::matrix::{exact_residual, ColumnVector, Matrix};
use crate::scalar::{Rational, Scalar, ScalarKind};

use super::format::{parse_document, Directive, Problem};
use super::render::{render_tableau, Style};
use super::solve::{render_vector, run_method, Method, Trace};
use super::verify::{verify_all, VerificationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Solution(ColumnVector),
    Inconsistent { row: usize },
    Singular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Landmark {
    pub line: usize,
    pub kind: String,
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusProblem {
    pub id: String,
    pub source: String,
    pub problem: Problem,
    pub expected: Expected,
    /// Where the expected values come from, e.g. `printed` or `computed`.
    pub provenance: String,
    pub method: Option<Method>,
    pub script: Vec<Vec<(i64, usize)>>,
    pub landmarks: Vec<Landmark>,
    /// Golden files named by `check golden` lines, by file name.
    pub goldens: BTreeMap<String, String>,
}

fn bad(d: &Directive, message: impl Into<String>) -> Error {
    Error::Parse {
        line: d.line,
        message: message.into(),
    }
}

fn parse_vector(text: &str, kind: ScalarKind) -> Result<ColumnVector> {
    text.split_whitespace().map(|t| Scalar::parse(t, kind)).collect()
}

fn parse_exact_matrix(text: &str) -> Result<Matrix> {
    let rows = text
        .split('/')
        .map(|r| parse_vector(r, ScalarKind::Exact))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

/// One combination such as `11*5 - 2*4`: `(coefficient, equation)` pairs.
fn parse_combination(text: &str) -> Option<Vec<(i64, usize)>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.replace('\u{2212}', "-");
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        let (c, k) = match term.split_once('*') {
            Some((c, k)) => (c.parse::<i64>().ok()?, k.parse::<usize>().ok()?),
            None => (1, term.parse::<usize>().ok()?),
        };
        terms.push((sign * c, k));
        rest = &body[end..];
    }
    (!terms.is_empty()).then_some(terms)
}

impl CorpusProblem {
    /// Parses a corpus file. `golden` fetches the files that `check golden`
    /// lines name.
    pub fn parse(text: &str, golden: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let doc = parse_document(text)?;
        let kind = doc.problem.kind();
        let id = doc
            .first("id")
            .map(|d| d.value.clone())
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: "corpus problem needs an `id` directive".into(),
            })?;
        let source = doc.first("source").map(|d| d.value.clone()).unwrap_or_default();
        let provenance = doc.first("provenance").map(|d| d.value.clone()).unwrap_or_default();
        let expected = match doc.first("expected") {
            None => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("{id}: no `expected` directive"),
                })
            }
            Some(d) => {
                let tokens: Vec<&str> = d.value.split_whitespace().collect();
                match tokens.as_slice() {
                    ["singular"] => Expected::Singular,
                    ["inconsistent", row] => Expected::Inconsistent {
                        row: row.parse().map_err(|_| bad(d, "bad row number"))?,
                    },
                    _ => Expected::Solution(parse_vector(&d.value, kind).map_err(|e| bad(d, e.to_string()))?),
                }
            }
        };
        let method = match doc.first("method") {
            Some(d) => Some(d.value.parse::<Method>().map_err(|e| bad(d, e.to_string()))?),
            None => None,
        };
        let mut script = Vec::new();
        for d in doc.all("script") {
            for part in d.value.split(';').filter(|p| !p.trim().is_empty()) {
                script.push(parse_combination(part).ok_or_else(|| bad(d, format!("bad combination {part:?}")))?);
            }
        }
        let mut landmarks = Vec::new();
        let mut goldens = BTreeMap::new();
        for d in doc.all("check") {
            let (head, value) = d.value.split_once('|').unwrap_or((&d.value, ""));
            let mut words = head.split_whitespace().map(str::to_string);
            let kind = words.next().ok_or_else(|| bad(d, "empty check"))?;
            let landmark = Landmark {
                line: d.line,
                kind,
                args: words.collect(),
                value: value.trim().to_string(),
            };
            if landmark.kind == "golden" {
                let file = landmark.value.clone();
                let content = golden(&file).ok_or_else(|| bad(d, format!("golden file {file:?} not found")))?;
                goldens.insert(file, content);
            }
            landmarks.push(landmark);
        }
        let p = CorpusProblem {
            id,
            source,
            problem: doc.problem,
            expected,
            provenance,
            method,
            script,
            landmarks,
            goldens,
        };
        p.check_expected_residual()?;
        Ok(p)
    }

    /// An exact expected solution must satisfy its own system.
    fn check_expected_residual(&self) -> Result<()> {
        let (Expected::Solution(x), Problem::Linear(sys)) = (&self.expected, &self.problem) else {
            return Ok(());
        };
        if sys.kind() != ScalarKind::Exact {
            return Ok(());
        }
        if x.len() != sys.n() || exact_residual(&sys.a, x, &sys.b).iter().any(|r| r != &Rational::default()) {
            return Err(Error::InvalidArgument(format!(
                "{}: expected solution {} does not satisfy the system",
                self.id,
                render_vector(x)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CorpusOutcome {
    pub id: String,
    pub source: String,
    pub report: VerificationReport,
    pub failures: Vec<String>,
}

impl CorpusOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn landmark_system(p: &CorpusProblem) -> Result<&LinearSystem> {
    match &p.problem {
        Problem::Linear(s) => Ok(s),
        Problem::LeastSquares(_) => Err(Error::InvalidArgument("landmark needs a linear system".into())),
    }
}

fn arg(l: &Landmark, i: usize) -> Result<usize> {
    l.args
        .get(i)
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("line {}: `{}` needs a number", l.line, l.kind)))
}

fn same_values(found: &[Scalar], expected: &str) -> Result<bool> {
    let want = parse_vector(expected, ScalarKind::Exact)?;
    Ok(found.len() == want.len() && found.iter().zip(&want).all(|(a, b)| a.to_rational() == b.to_rational()))
}

fn same_matrix(found: &Matrix, expected: &str) -> Result<bool> {
    let want = parse_exact_matrix(expected)?;
    Ok(found.shape() == want.shape() && found.to_rationals() == want.to_rationals())
}

fn derivation_check(d: &Derivation, l: &Landmark, what: &str) -> Result<Option<String>> {
    let n = arg(l, 0)?;
    let row = d.row(n).ok_or_else(|| Error::InvalidArgument(format!("no equation {n}")))?;
    let (ok, found) = match what {
        "row" => (same_values(&row.values, &l.value)?, render_vector(&row.values)),
        "equation" => {
            let eq = d.equation(row);
            (eq == l.value, eq)
        }
        _ => {
            let prov = d.provenance(row);
            (prov == l.value, prov)
        }
    };
    Ok((!ok).then(|| format!("equation {n}: found {found}, expected {}", l.value)))
}

/// `None` when the landmark holds, else a description of the mismatch.
fn check_landmark(p: &CorpusProblem, l: &Landmark) -> Result<Option<String>> {
    let sys = landmark_system(p);
    let mismatch = |ok: bool, found: String| (!ok).then(|| format!("found {found}, expected {}", l.value));
    match l.kind.as_str() {
        "stage" => {
            let e = schoolbook_solve(sys?, false)?;
            let k = arg(l, 0)?;
            let stage = e.log.stages.get(k - 1).ok_or_else(|| Error::InvalidArgument(format!("no stage {k}")))?;
            Ok(mismatch(same_matrix(&stage.matrix, &l.value)?, format!("\n{}", stage.matrix)))
        }
        "stage-equation" => {
            let sys = sys?;
            let e = schoolbook_solve(sys, false)?;
            let (k, r) = (arg(l, 0)?, arg(l, 1)?);
            let systems = e.systems(&sys.names);
            let eq = systems
                .get(k - 1)
                .and_then(|(_, eqs)| eqs.get(r - 1))
                .ok_or_else(|| Error::InvalidArgument(format!("no equation {r} at stage {k}")))?;
            Ok(mismatch(eq == &l.value, eq.clone()))
        }
        "ldu-lower" | "ldu-upper" => {
            let (f, _) = ldu_decompose(&sys?.a, false)?;
            let m = if l.kind == "ldu-lower" { f.l.clone() } else { f.upper() };
            Ok(mismatch(same_matrix(&m, &l.value)?, format!("\n{m}")))
        }
        "ff-row" | "ff-equation" | "ff-provenance" => {
            let ff = fraction_free_solve(sys?)?;
            derivation_check(&ff.derivation, l, &l.kind[3..])
        }
        "ff-last" => {
            let ff = fraction_free_solve(sys?)?;
            let last = ff.last_row();
            Ok(mismatch(same_values(&last.values, &l.value)?, render_vector(&last.values)))
        }
        "ff-integral" => {
            let ff = fraction_free_solve(sys?)?;
            Ok(mismatch(ff.derivation.all_integer(), "a fraction".into()))
        }
        "script-row" | "script-equation" | "script-provenance" => {
            let d = replay_combinations(sys?, &p.script)?;
            derivation_check(&d, l, &l.kind[7..])
        }
        "script-solve" | "ff-solve" => {
            let d = if l.kind == "ff-solve" {
                fraction_free_solve(sys?)?.derivation
            } else {
                replay_combinations(sys?, &p.script)?
            };
            let rows = l.args.iter().map(|a| a.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>();
            let rows = rows.map_err(|_| Error::InvalidArgument(format!("line {}: bad equation list", l.line)))?;
            let x = d.solve_from(&rows)?;
            Ok(mismatch(same_values(&x, &l.value)?, render_vector(&x)))
        }
        "rolle" => {
            let (_, t) = rolle_solve(sys?)?;
            let n = arg(l, 0)?;
            let row = t.row(n).ok_or_else(|| Error::InvalidArgument(format!("no direction row {n}")))?;
            let eq = t.equation(row);
            Ok(mismatch(eq == l.value, eq))
        }
        "closed-form" => {
            let sys = sys?;
            let x = match l.args.first().map(String::as_str) {
                Some("diophantus") => closed_form_diophantus(&sys.b)?,
                Some("aryabhata") => closed_form_aryabhata(&sys.b)?,
                other => return Err(Error::InvalidArgument(format!("unknown closed form {other:?}"))),
            };
            Ok(mismatch(same_values(&x, &l.value)?, render_vector(&x)))
        }
        "golden" => {
            let method: Method = l
                .args
                .first()
                .ok_or_else(|| Error::InvalidArgument("golden needs a method".into()))?
                .parse()?;
            let run = run_method(sys?, method, false)?;
            let rendered: String = run
                .traces
                .iter()
                .map(|t| match t {
                    Trace::Tableau(t) => render_tableau(t, Style::Text),
                    Trace::Text(s) => s.clone(),
                })
                .collect();
            let want = &p.goldens[&l.value];
            if &rendered == want {
                return Ok(None);
            }
            let first_diff = rendered
                .lines()
                .zip(want.lines())
                .position(|(a, b)| a != b)
                .map_or_else(|| "length differs".to_string(), |i| format!("line {} differs", i + 1));
            Ok(Some(format!("{} does not match the rendered tableau: {first_diff}", l.value)))
        }
        other => Err(Error::InvalidArgument(format!("unknown landmark kind {other:?}"))),
    }
}

fn check_expected(p: &CorpusProblem, report: &VerificationReport, failures: &mut Vec<String>) {
    match &p.expected {
        Expected::Solution(x) => {
            if !report.passed() {
                failures.push(format!("verification failed:\n{}", report.render()));
            }
            let compared: Vec<(&str, &ColumnVector)> = match (p.method, p.problem.kind()) {
                (Some(m), _) => report.solution(m.name()).map(|s| (m.name(), s)).into_iter().collect(),
                (None, ScalarKind::Exact) => report.solutions().collect(),
                (None, ScalarKind::Fixed(_)) => {
                    failures.push("fixed-precision problems need a `method` directive".into());
                    Vec::new()
                }
            };
            if compared.is_empty() {
                failures.push("no method produced a solution to compare".into());
            }
            for (m, s) in compared {
                if s != x {
                    failures.push(format!("{m}: found {}, expected {}", render_vector(s), render_vector(x)));
                }
            }
        }
        Expected::Inconsistent { .. } | Expected::Singular => {
            let want = match p.expected {
                Expected::Inconsistent { row } => Error::Inconsistent { row },
                _ => Error::Singular { step: 0 },
            };
            let ok = report.consistent_failure
                && match (&report.diagnosis, &want) {
                    (Some(Error::Singular { .. }), Error::Singular { .. }) => true,
                    (Some(found), want) => found == want,
                    (None, _) => false,
                };
            if !ok {
                let found = report.diagnosis.as_ref().map_or("a solution".to_string(), |e| e.to_string());
                failures.push(format!("expected every method to fail with {want}, found {found}"));
            }
        }
    }
}

pub fn check_problem(p: &CorpusProblem) -> CorpusOutcome {
    let report = verify_all(&p.problem);
    let mut failures = Vec::new();
    check_expected(p, &report, &mut failures);
    for l in &p.landmarks {
        match check_landmark(p, l) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(format!("check {} {}: {msg}", l.kind, l.args.join(" "))),
            Err(e) => failures.push(format!("check {} {}: {e}", l.kind, l.args.join(" "))),
        }
    }
    CorpusOutcome {
        id: p.id.clone(),
        source: p.source.clone(),
        report,
        failures,
    }
}

const BUILTIN: &[(&str, &str)] = &[
    ("schoolbook.txt", include_str!("../../corpus/schoolbook.txt")),
    ("ldu.txt", include_str!("../../corpus/ldu.txt")),
    ("nine-chapters.txt", include_str!("../../corpus/nine-chapters.txt")),
    ("buteo.txt", include_str!("../../corpus/buteo.txt")),
    ("peletier.txt", include_str!("../../corpus/peletier.txt")),
    ("rolle.txt", include_str!("../../corpus/rolle.txt")),
    ("babylonian.txt", include_str!("../../corpus/babylonian.txt")),
    ("rhind.txt", include_str!("../../corpus/rhind.txt")),
    ("diophantus.txt", include_str!("../../corpus/diophantus.txt")),
    ("aryabhata.txt", include_str!("../../corpus/aryabhata.txt")),
    ("dwyer.txt", include_str!("../../corpus/dwyer.txt")),
    ("line-fit.txt", include_str!("../../corpus/line-fit.txt")),
    ("correlates.txt", include_str!("../../corpus/correlates.txt")),
    ("singular.txt", include_str!("../../corpus/singular.txt")),
];

const BUILTIN_GOLDENS: &[(&str, &str)] = &[("dwyer.golden", include_str!("../../corpus/dwyer.golden"))];

/// The corpus files compiled into the library, by file name.
pub fn builtin_files() -> &'static [(&'static str, &'static str)] {
    BUILTIN
}

fn builtin_golden(name: &str) -> Option<String> {
    BUILTIN_GOLDENS.iter().find(|(n, _)| *n == name).map(|(_, g)| g.to_string())
}

fn with_file(name: &str, e: Error) -> Error {
    Error::InvalidArgument(format!("{name}: {e}"))
}

pub fn builtin_corpus() -> Result<Vec<CorpusProblem>> {
    BUILTIN
        .iter()
        .map(|(name, text)| CorpusProblem::parse(text, builtin_golden).map_err(|e| with_file(name, e)))
        .collect()
}

/// Every `*.txt` file in `dir`, in name order; golden files are read from
/// the same directory.
pub fn load_dir(dir: &Path) -> Result<Vec<CorpusProblem>> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("{}: {e}", dir.display()));
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    let golden = |name: &str| fs::read_to_string(dir.join(name)).ok();
    paths
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(io)?;
            CorpusProblem::parse(&text, golden).map_err(|e| with_file(&path.display().to_string(), e))
        })
        .collect()
}

/// Checks every problem, or only the one named `id`.
pub fn run_corpus(problems: &[CorpusProblem], id: Option<&str>) -> Result<Vec<CorpusOutcome>> {
    let selected: Vec<&CorpusProblem> = problems.iter().filter(|p| id.is_none_or(|id| p.id == id)).collect();
    if let Some(id) = id {
        if selected.is_empty() {
            return Err(Error::InvalidArgument(format!("no corpus problem {id:?}")));
        }
    }
    Ok(selected.into_iter().map(check_problem).collect())
}
