//! The problem file format.
//!
//! ```text
//! # comment
//! #@ vars x v z y
//! exact 3 4
//! 3 2 1 39
//! 2 3 1 34
//! 1 2 3 26
//! ```
//!
//! The header gives the kind (`exact`, `fixed frac=K` or `fixed sig=K`),
//! the row count, and the column count including the right-hand side.
//! Lines starting with `#@` are directives; `vars` names the unknowns and
//! `lsq 1` or `lsq 2` makes the file a least-squares problem.

use crate::eliminate::LinearSystem;
use crate::error::{Error, Result};
use crate::leastsq::{LsqCase, LsqProblem};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, ScalarKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Linear(LinearSystem),
    LeastSquares(LsqProblem),
}

impl Problem {
    pub fn kind(&self) -> ScalarKind {
        match self {
            Problem::Linear(s) => s.kind(),
            Problem::LeastSquares(p) => p.a.kind(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directive {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub problem: Problem,
    pub directives: Vec<Directive>,
}

impl Document {
    /// Values of every directive with this key, in file order.
    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Directive> + 'a {
        self.directives.iter().filter(move |d| d.key == key)
    }

    pub fn first<'a>(&'a self, key: &'a str) -> Option<&'a Directive> {
        self.all(key).next()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits `kind rows cols` and validates the counts.
fn parse_header(line: usize, text: &str) -> Result<(ScalarKind, usize, usize)> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let (kind_text, counts) = match tokens.first() {
        Some(&"exact") => ("exact".to_string(), &tokens[1..]),
        Some(&"fixed") if tokens.len() >= 2 => (format!("fixed {}", tokens[1]), &tokens[2..]),
        _ => return Err(parse_err(line, format!("header must start with `exact` or `fixed`: {text:?}"))),
    };
    let kind: ScalarKind = kind_text.parse()?;
    let [rows, cols] = counts else {
        return Err(parse_err(line, "header needs a row count and a column count"));
    };
    let rows: usize = rows.parse().map_err(|_| parse_err(line, format!("bad row count {rows:?}")))?;
    let cols: usize = cols.parse().map_err(|_| parse_err(line, format!("bad column count {cols:?}")))?;
    if rows == 0 || cols < 2 {
        return Err(parse_err(line, "need at least one row and one unknown"));
    }
    Ok((kind, rows, cols))
}

/// Parses a whole file, keeping its directives.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut directives = Vec::new();
    let mut header = None;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if let Some(rest) = raw.trim_start().strip_prefix("#@") {
            let rest = rest.trim();
            let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            directives.push(Directive {
                line,
                key: key.to_string(),
                value: value.trim().to_string(),
            });
            continue;
        }
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match header {
            None => header = Some(parse_header(line, content)?),
            Some((kind, nrows, ncols)) => {
                if rows.len() == nrows {
                    return Err(parse_err(line, format!("more than the {nrows} rows the header declares")));
                }
                let tokens: Vec<&str> = content.split_whitespace().collect();
                if tokens.len() != ncols {
                    return Err(parse_err(line, format!("expected {ncols} entries, found {}", tokens.len())));
                }
                let row = tokens
                    .iter()
                    .map(|t| {
                        Scalar::parse(t, kind).map_err(|e| match e {
                            Error::MixedKinds { .. } => e,
                            other => parse_err(line, other.to_string()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
    }
    let Some((_, nrows, _)) = header else {
        return Err(parse_err(0, "missing header"));
    };
    if rows.len() != nrows {
        return Err(parse_err(0, format!("header declares {nrows} rows, found {}", rows.len())));
    }
    let (a, b) = Matrix::from_rows(rows)?.split_last_column();
    let doc_problem = |directives: &[Directive]| -> Result<Problem> {
        let lsq = directives.iter().find(|d| d.key == "lsq");
        if let Some(d) = lsq {
            let case = match d.value.as_str() {
                "1" => LsqCase::Case1,
                "2" => LsqCase::Case2,
                other => return Err(parse_err(d.line, format!("least-squares case must be 1 or 2, not {other:?}"))),
            };
            return Ok(Problem::LeastSquares(LsqProblem::new(case, a.clone(), b.clone())?));
        }
        let mut sys = LinearSystem::unnamed(a.clone(), b.clone())?;
        if let Some(d) = directives.iter().find(|d| d.key == "vars") {
            let names: Vec<&str> = d.value.split_whitespace().collect();
            sys = sys.with_names(&names).map_err(|e| parse_err(d.line, e.to_string()))?;
        }
        Ok(Problem::Linear(sys))
    };
    let problem = doc_problem(&directives)?;
    Ok(Document { problem, directives })
}

/// Parses a problem file into a linear system or a least-squares problem.
pub fn parse_system(text: &str) -> Result<Problem> {
    Ok(parse_document(text)?.problem)
}

/// Writes a problem back out in the file format.
pub fn write_problem(p: &Problem) -> String {
    let (a, b, kind) = match p {
        Problem::Linear(s) => (&s.a, &s.b, s.kind()),
        Problem::LeastSquares(q) => (&q.a, &q.b, q.a.kind()),
    };
    let mut out = String::new();
    match p {
        Problem::Linear(s) => out.push_str(&format!("#@ vars {}\n", s.names.join(" "))),
        Problem::LeastSquares(q) => {
            let case = if q.case == LsqCase::Case1 { 1 } else { 2 };
            out.push_str(&format!("#@ lsq {case}\n"));
        }
    }
    out.push_str(&format!("{kind} {} {}\n", a.rows(), a.cols() + 1));
    for i in 0..a.rows() {
        let mut tokens: Vec<String> = a.row(i).iter().map(Scalar::render_plain).collect();
        tokens.push(b[i].render_plain());
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;
    use crate::scalar::{ratio, PrecisionSpec};

    #[test]
    fn exact_three_by_three() {
        let p = parse_system("exact 3 4\n3 2 1 39\n2 3 1 34\n1 2 3 26\n").unwrap();
        let Problem::Linear(s) = p else { panic!("expected a linear system") };
        assert_eq!(s.n(), 3);
        assert_eq!(s.b, exact_vector(&[39, 34, 26]));
    }

    #[test]
    fn fractions_comments_and_names() {
        let text = "# fields\n#@ vars x y\nexact 2 3\n1 1 1800  # area\n2/3 -1/2 500\n";
        let Problem::Linear(s) = parse_system(text).unwrap() else { panic!() };
        assert_eq!(s.a.get(1, 0).to_rational(), ratio(2, 3));
        assert_eq!(s.names, vec!["x", "y"]);
        assert_eq!(Scalar::parse("17/4", ScalarKind::Exact).unwrap(), Scalar::exact(17, 4));
    }

    #[test]
    fn fixed_header() {
        let Problem::Linear(s) = parse_system("fixed frac=4 1 2\n.5000 .2500\n").unwrap() else { panic!() };
        assert_eq!(s.kind(), ScalarKind::Fixed(PrecisionSpec::fractional(4).unwrap()));
    }

    #[test]
    fn least_squares_directive() {
        let p = parse_system("#@ lsq 1\nexact 3 2\n1 1\n1 2\n1 3\n").unwrap();
        assert!(matches!(p, Problem::LeastSquares(LsqProblem { case: LsqCase::Case1, .. })));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_system("exactly 1 2\n1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_system("exact 2 3\n1 2 3\n1 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_system("exact 2 3\n1 2 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_system("fixed frac=4 1 2\n1/3 1\n"), Err(Error::MixedKinds { .. })));
        assert!(parse_system("fixed wobble=4 1 2\n1 1\n").is_err());
        assert!(matches!(parse_system("# nothing\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn write_then_parse() {
        let text = "#@ vars a b\nexact 2 3\n1 -1/2 3\n0 2 5\n";
        let p = parse_system(text).unwrap();
        assert_eq!(parse_system(&write_problem(&p)).unwrap(), p);
    }
}
