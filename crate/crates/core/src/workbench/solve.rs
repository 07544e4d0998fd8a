//! One entry point per method, for the command line and the verifier.

use std::fmt;
use std::str::FromStr;

use crate::compact::{
    cholesky_factor, cholesky_solve, cholesky_squared_solve, crout_solve, doolittle_back, doolittle_forward,
    doolittle_refine, dwyer_single_division, satterthwaite_factor, Tableau,
};
use crate::eliminate::{fraction_free_solve, rolle_solve, schoolbook_solve, LinearSystem};
use crate::error::{Error, Result};
use crate::ldu::{back_sub, forward_sub, ldu_decompose};
use crate::leastsq::{
    bracket_from_normal, bracket_init, build_normal, correlate_recover, gauss_reduce_solve, LsqCase, LsqProblem,
};
use crate::matrix::{exact_residual, ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::{Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Schoolbook,
    FractionFree,
    Rolle,
    Ldu,
    Doolittle,
    Crout,
    Cholesky,
    Dwyer,
    Satterthwaite,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Schoolbook,
        Method::FractionFree,
        Method::Rolle,
        Method::Ldu,
        Method::Doolittle,
        Method::Crout,
        Method::Cholesky,
        Method::Dwyer,
        Method::Satterthwaite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Schoolbook => "schoolbook",
            Method::FractionFree => "fraction-free",
            Method::Rolle => "rolle",
            Method::Ldu => "ldu",
            Method::Doolittle => "doolittle",
            Method::Crout => "crout",
            Method::Cholesky => "cholesky",
            Method::Dwyer => "dwyer",
            Method::Satterthwaite => "satterthwaite",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsqMethod {
    Bracket,
    Doolittle,
    Cholesky,
}

impl FromStr for LsqMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bracket" => Ok(LsqMethod::Bracket),
            "doolittle" => Ok(LsqMethod::Doolittle),
            "cholesky" => Ok(LsqMethod::Cholesky),
            other => Err(Error::InvalidArgument(format!("unknown least-squares method {other:?}"))),
        }
    }
}

/// A record of how a solution was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Tableau(Tableau),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub solution: ColumnVector,
    pub traces: Vec<Trace>,
}

fn require_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

fn negated(v: &[Scalar]) -> ColumnVector {
    let ar = Arith::new(v.first().map_or(ScalarKind::Exact, Scalar::kind));
    v.iter().map(|x| ar.neg(x)).collect()
}

/// Doolittle's tables for a symmetric `A·x = b`, taken as `0 = A·x − b`.
fn doolittle_run(a: &Matrix, b: &[Scalar]) -> Result<Run> {
    require_symmetric(a)?;
    let (ta, tb) = doolittle_forward(a, &negated(b))?;
    let (tc, td, x) = doolittle_back(&ta)?;
    Ok(Run {
        solution: x,
        traces: [ta, tb, tc, td].into_iter().map(Trace::Tableau).collect(),
    })
}

/// Cholesky's method on a symmetric `A·x = b`: numerically in fixed
/// arithmetic, through the squared form in exact arithmetic.
fn cholesky_run(a: &Matrix, b: &[Scalar]) -> Result<Run> {
    require_symmetric(a)?;
    match a.kind() {
        ScalarKind::Exact => {
            let (l, d) = crate::compact::cholesky_squared(a)?;
            let mut ar = Arith::new(a.kind());
            let z = forward_sub(&l, b)?;
            let w: Vec<Scalar> = z.iter().zip(&d).map(|(zi, di)| ar.div(zi, di)).collect::<Result<_>>()?;
            let x = back_sub(&l.transpose(), &w)?;
            Ok(Run {
                solution: x,
                traces: vec![Trace::Text(format!("L =\n{l}D = {}\n", render_vector(&d)))],
            })
        }
        ScalarKind::Fixed(_) => {
            let beta = cholesky_factor(a)?;
            let y = forward_sub(&beta, b)?;
            let x = back_sub(&beta.transpose(), &y)?;
            Ok(Run {
                solution: x,
                traces: vec![Trace::Text(format!("\u{3b2} =\n{beta}y = {}\n", render_vector(&y)))],
            })
        }
    }
}

pub fn render_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(Scalar::render_table).collect();
    format!("({})", parts.join(", "))
}

/// Solves a square system with one method.
pub fn run_method(sys: &LinearSystem, method: Method, pivoting: bool) -> Result<Run> {
    match method {
        Method::Schoolbook => {
            let out = schoolbook_solve(sys, pivoting)?;
            let text = out
                .systems(&sys.names)
                .into_iter()
                .map(|(label, eqs)| format!("{label}\n{}\n", eqs.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n")))
                .collect();
            Ok(Run {
                solution: out.solution,
                traces: vec![Trace::Text(text)],
            })
        }
        Method::FractionFree => {
            let out = fraction_free_solve(sys)?;
            Ok(Run {
                solution: out.solution,
                traces: vec![Trace::Text(out.derivation.render())],
            })
        }
        Method::Rolle => {
            let (x, trace) = rolle_solve(sys)?;
            Ok(Run {
                solution: x,
                traces: vec![Trace::Text(trace.render())],
            })
        }
        Method::Ldu => {
            sys.require_square()?;
            let (f, log) = ldu_decompose(&sys.a, pivoting)?;
            let x = f.solve(&sys.b)?;
            let mut text = String::new();
            for stage in &log.stages {
                text.push_str(&format!("{}\n{}", stage.label, stage.matrix));
            }
            text.push_str(&format!("L =\n{}D·U =\n{}", f.l, f.upper()));
            Ok(Run {
                solution: x,
                traces: vec![Trace::Text(text)],
            })
        }
        Method::Doolittle => doolittle_run(&sys.a, &sys.b),
        Method::Crout => {
            let out = crout_solve(&sys.a, &sys.b)?;
            Ok(Run {
                solution: out.x,
                traces: vec![Trace::Tableau(out.tableau)],
            })
        }
        Method::Cholesky => cholesky_run(&sys.a, &sys.b),
        Method::Dwyer => {
            let out = dwyer_single_division(&sys.a, &sys.b)?;
            Ok(Run {
                solution: out.x,
                traces: vec![Trace::Tableau(out.tableau)],
            })
        }
        Method::Satterthwaite => {
            sys.require_square()?;
            let t = satterthwaite_factor(&sys.a)?;
            let x = t.solve(&sys.b)?;
            Ok(Run {
                solution: x,
                traces: vec![Trace::Text(format!("R1 =\n{}S1 =\n{}T1 =\n{}", t.r1, t.s1, t.t1))],
            })
        }
    }
}

/// Solves, then refines `rounds` times. Doolittle refines in his tables E
/// and F; every other method solves `A·e = r` again for the rounded
/// residual `r = b − A·x̄`. Corrected values `x̄ + e` are exact sums, so a
/// refined solution comes back in exact scalars.
pub fn run_refined(sys: &LinearSystem, method: Method, pivoting: bool, rounds: usize) -> Result<Run> {
    if rounds > 0 && method == Method::Doolittle {
        let first = doolittle_run(&sys.a, &sys.b)?;
        let report = doolittle_refine(&sys.a, &negated(&sys.b), &first.solution, sys.kind(), rounds)?;
        if report.diverged {
            return Err(Error::InvalidArgument("refinement diverged: the residual grew".into()));
        }
        let mut traces = first.traces;
        for (te, tf) in report.tables {
            traces.push(Trace::Tableau(te));
            traces.push(Trace::Tableau(tf));
        }
        return Ok(Run {
            solution: report.solution,
            traces,
        });
    }
    let mut run = run_method(sys, method, pivoting)?;
    let kind = sys.kind();
    for _ in 0..rounds {
        let r: ColumnVector = exact_residual(&sys.a, &run.solution, &sys.b)
            .into_iter()
            .map(|q| Scalar::from_rational(-q, kind))
            .collect();
        if r.iter().all(Scalar::is_zero) {
            break;
        }
        let correction = LinearSystem::new(sys.a.clone(), r, sys.names.clone())?;
        let e = run_method(&correction, method, pivoting)?.solution;
        run.solution = run
            .solution
            .iter()
            .zip(&e)
            .map(|(x, d)| Scalar::Exact(x.to_rational() + d.to_rational()))
            .collect();
    }
    Ok(run)
}

/// Solves a least-squares problem through its normal equations.
pub fn run_lsq(p: &LsqProblem, method: LsqMethod) -> Result<Run> {
    let (n, rhs) = build_normal(p)?;
    let recover = |u: ColumnVector| -> Result<ColumnVector> {
        match p.case {
            LsqCase::Case1 => Ok(u),
            LsqCase::Case2 => correlate_recover(p, &u),
        }
    };
    match method {
        LsqMethod::Bracket => {
            let table = match p.case {
                LsqCase::Case1 => bracket_init(&p.a, &p.b)?,
                LsqCase::Case2 => bracket_from_normal(&n, &rhs)?,
            };
            let u = gauss_reduce_solve(&table)?;
            let reduced = crate::leastsq::bracket_reduce_full(&table)?;
            Ok(Run {
                solution: recover(u)?,
                traces: vec![Trace::Text(reduced.render())],
            })
        }
        LsqMethod::Doolittle => {
            let run = doolittle_run(&n, &rhs)?;
            Ok(Run {
                solution: recover(run.solution)?,
                traces: run.traces,
            })
        }
        LsqMethod::Cholesky => match (p.case, n.kind()) {
            (LsqCase::Case2, ScalarKind::Fixed(_)) => {
                let (f, t) = cholesky_solve(p)?;
                Ok(Run {
                    solution: f.x,
                    traces: vec![Trace::Tableau(t)],
                })
            }
            _ => Ok(Run {
                solution: cholesky_squared_solve(p)?,
                traces: Vec::new(),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_method_on_a_symmetric_system() {
        let sys = LinearSystem::from_i64(&[&[4, 1, 2, 9], &[1, 3, 0, 5], &[2, 0, 5, 12]]);
        let expected = run_method(&sys, Method::Schoolbook, false).unwrap().solution;
        for m in Method::ALL {
            assert_eq!(run_method(&sys, m, false).unwrap().solution, expected, "{m}");
        }
    }

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("gauss-jordan".parse::<Method>().is_err());
    }

    #[test]
    fn refinement_in_exact_mode_is_a_no_op() {
        let sys = LinearSystem::from_i64(&[&[2, 1, 3], &[1, 3, 5]]);
        let run = run_refined(&sys, Method::Crout, false, 2).unwrap();
        assert_eq!(run.solution, vec![Scalar::exact(4, 5), Scalar::exact(7, 5)]);
    }
}
