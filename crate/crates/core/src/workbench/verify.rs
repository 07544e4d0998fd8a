//! Runs every applicable method on one problem and checks that they agree.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::compact::{crout_solve, doolittle_forward, dwyer_single_division, replay_crout, replay_doolittle, replay_dwyer};
use crate::eliminate::{classify_failure, fraction_free_solve, max_discrepancy, schoolbook_solve, LinearSystem};
use crate::error::{Error, Result};
use crate::ldu::{ldu_decompose, reconstruct};
use crate::leastsq::{bracket_init, bracket_reduce_full, build_normal, LsqCase, LsqProblem};
use crate::matrix::{exact_residual, mat_vec, ColumnVector};
use crate::scalar::{Rational, Scalar, ScalarKind};

use super::format::Problem;
use super::solve::{render_vector, run_lsq, run_method, LsqMethod, Method};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(ColumnVector),
    Failed(Error),
    /// The method cannot run on this input (natural pivots vanish, or the
    /// matrix is not symmetric positive definite), though the problem is
    /// solvable.
    NotApplicable(Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub kind: ScalarKind,
    pub methods: Vec<(String, Outcome)>,
    /// `(method, method, max |difference|)` for every pair that solved.
    pub discrepancies: Vec<(String, String, Rational)>,
    pub checks: Vec<Check>,
    /// Every method failed, so the problem itself has no unique solution.
    pub consistent_failure: bool,
    pub diagnosis: Option<Error>,
}

impl VerificationReport {
    pub fn solutions(&self) -> impl Iterator<Item = (&str, &ColumnVector)> {
        self.methods.iter().filter_map(|(m, o)| match o {
            Outcome::Solved(x) => Some((m.as_str(), x)),
            _ => None,
        })
    }

    pub fn solution(&self, method: &str) -> Option<&ColumnVector> {
        self.solutions().find(|(m, _)| *m == method).map(|(_, x)| x)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Something solved and every check held.
    pub fn passed(&self) -> bool {
        !self.consistent_failure && self.solutions().next().is_some() && self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind: {}", self.kind);
        for (m, o) in &self.methods {
            let _ = match o {
                Outcome::Solved(x) => writeln!(out, "{m:>14}: {}", render_vector(x)),
                Outcome::Failed(e) => writeln!(out, "{m:>14}: failed: {e}"),
                Outcome::NotApplicable(e) => writeln!(out, "{m:>14}: not applicable: {e}"),
            };
        }
        let worst = self.discrepancies.iter().map(|(_, _, d)| d).max();
        if let Some(d) = worst {
            let _ = writeln!(out, "max discrepancy: {}", Scalar::Exact(d.clone()));
        }
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            let _ = writeln!(out, "[{mark}] {}: {}", c.name, c.detail);
        }
        if self.consistent_failure {
            let why = self.diagnosis.as_ref().map_or(String::new(), |e| format!(" ({e})"));
            let _ = writeln!(out, "consistent-failure: every method reports the system unsolvable{why}");
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs `f`, turning errors into report entries.
fn outcome(r: Result<ColumnVector>) -> Outcome {
    match r {
        Ok(x) => Outcome::Solved(x),
        Err(e) => Outcome::Failed(e),
    }
}

fn is_pivot_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Singular { .. }
            | Error::ZeroDiagonal { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotSymmetric
            | Error::IrrationalRoot { .. }
    )
}

fn pairwise(methods: &[(String, Outcome)]) -> Vec<(String, String, Rational)> {
    let solved: Vec<(&String, &ColumnVector)> = methods
        .iter()
        .filter_map(|(m, o)| match o {
            Outcome::Solved(x) => Some((m, x)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (i, (m1, x1)) in solved.iter().enumerate() {
        for (m2, x2) in &solved[i + 1..] {
            out.push(((*m1).clone(), (*m2).clone(), max_discrepancy(x1, x2)));
        }
    }
    out
}

fn agreement_check(kind: ScalarKind, discrepancies: &[(String, String, Rational)]) -> Check {
    let worst = discrepancies.iter().map(|(_, _, d)| d.clone()).max().unwrap_or_default();
    match kind {
        ScalarKind::Exact => check(
            "agreement",
            worst.is_zero(),
            format!("largest pairwise difference {}", Scalar::Exact(worst)),
        ),
        ScalarKind::Fixed(_) => check(
            "agreement",
            true,
            format!("largest pairwise difference {} (rounded arithmetic)", Scalar::Exact(worst)),
        ),
    }
}

pub fn verify_all(problem: &Problem) -> VerificationReport {
    match problem {
        Problem::Linear(sys) => verify_linear(sys),
        Problem::LeastSquares(p) => verify_lsq(p),
    }
}

/// Methods in natural pivot order may be skipped when pivoting succeeds;
/// every method is expected to fail when pivoting fails.
fn verify_linear(sys: &LinearSystem) -> VerificationReport {
    let kind = sys.kind();
    let pivoted = outcome(schoolbook_solve(sys, true).map(|e| e.solution));
    let solvable = matches!(pivoted, Outcome::Solved(_));
    let mut methods = vec![("schoolbook-pivot".to_string(), pivoted)];
    for m in Method::ALL {
        let o = outcome(run_method(sys, m, false).map(|r| r.solution));
        let o = match o {
            Outcome::Failed(e) if solvable && is_pivot_failure(&e) => Outcome::NotApplicable(e),
            other => other,
        };
        methods.push((m.name().to_string(), o));
    }
    let ldu_pivot = outcome(ldu_decompose(&sys.a, true).and_then(|(f, _)| f.solve(&sys.b)));
    methods.push(("ldu-pivot".to_string(), ldu_pivot));

    let discrepancies = pairwise(&methods);
    let all_failed = methods.iter().all(|(_, o)| !matches!(o, Outcome::Solved(_)));
    if all_failed {
        let diagnosis = sys.require_square().err().or_else(|| Some(classify_failure(&sys.augmented().with_kind(ScalarKind::Exact))));
        return VerificationReport {
            kind,
            methods,
            discrepancies,
            checks: Vec::new(),
            consistent_failure: true,
            diagnosis,
        };
    }

    let mut checks = vec![agreement_check(kind, &discrepancies)];
    if !solvable {
        checks.push(check("consistency", false, "pivoted elimination failed while another method solved"));
    }
    if kind == ScalarKind::Exact {
        let bad: Vec<&str> = methods
            .iter()
            .filter_map(|(m, o)| match o {
                Outcome::Solved(x) if exact_residual(&sys.a, x, &sys.b).iter().any(|r| !r.is_zero()) => Some(m.as_str()),
                _ => None,
            })
            .collect();
        checks.push(check("residual", bad.is_empty(), if bad.is_empty() { "A·x = b exactly".to_string() } else { format!("nonzero residual from {}", bad.join(", ")) }));
    }
    checks.extend(trace_checks(sys));
    VerificationReport {
        kind,
        methods,
        discrepancies,
        checks,
        consistent_failure: false,
        diagnosis: None,
    }
}

/// Every tableau and log replays, integer inputs stay integral under double
/// multiplication, and the compact tables show the same factorization.
fn trace_checks(sys: &LinearSystem) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Ok(e) = schoolbook_solve(sys, true) {
        checks.push(check("schoolbook replay", e.log.replays(), "each stage follows from its steps"));
    }
    if let Ok(d) = dwyer_single_division(&sys.a, &sys.b) {
        let ok = replay_dwyer(&d.tableau).unwrap_or(false) && d.tableau.check_numbering().is_ok();
        checks.push(check("single-division replay", ok, "every row recomputed from the rows it names"));
    }
    if let Ok(c) = crout_solve(&sys.a, &sys.b) {
        let ok = replay_crout(&c.tableau, &sys.a, &sys.b).unwrap_or(false);
        checks.push(check("crout replay", ok, "every entry one accumulated operation"));
    }
    if let Ok((f, log)) = ldu_decompose(&sys.a, true) {
        let ok = log.replays() && (sys.kind() != ScalarKind::Exact || reconstruct(&f).ok() == Some(f.permuted(&sys.a)));
        checks.push(check("ldu reconstruction", ok, "P·A = L·D·U"));
    }
    let integral = sys.a.entries().iter().chain(&sys.b).all(Scalar::is_integer);
    if sys.kind() == ScalarKind::Exact && integral {
        if let Ok(ff) = fraction_free_solve(sys) {
            checks.push(check("fraction-free integers", ff.derivation.all_integer(), "integer rows throughout"));
        }
    }
    if sys.kind() == ScalarKind::Exact {
        if let Ok((f, _)) = ldu_decompose(&sys.a, false) {
            let ld = f.lower_scaled();
            let du = f.upper();
            if let Ok(c) = crout_solve(&sys.a, &sys.b) {
                let n = sys.n();
                let ok = (0..n).all(|i| {
                    (0..n).all(|j| {
                        let v = c.tableau.rows[i].cells[j].value();
                        if j <= i {
                            v == Some(ld.get(i, j))
                        } else {
                            v == Some(f.u.get(i, j))
                        }
                    })
                });
                checks.push(check("crout = (LD)U", ok, "lower part of Crout's table is L·D, upper part U"));
            }
            if sys.a.is_symmetric() {
                let neg: Vec<Scalar> = sys.b.iter().map(|v| Scalar::Exact(-v.to_rational())).collect();
                if let Ok((ta, tb)) = doolittle_forward(&sys.a, &neg) {
                    let n = sys.n();
                    let ok = (0..n).all(|k| (k..n).all(|j| ta.rows[2 * k].cells[j + 1].value() == Some(du.get(k, j))))
                        && replay_doolittle(&ta, &tb).unwrap_or(false);
                    checks.push(check("doolittle = L(DU)", ok, "pivot rows of table A are rows of D·U"));
                }
            }
        }
    }
    checks
}

fn verify_lsq(p: &LsqProblem) -> VerificationReport {
    let kind = p.a.kind();
    let mut methods = Vec::new();
    for (name, m) in [("bracket", LsqMethod::Bracket), ("doolittle", LsqMethod::Doolittle), ("cholesky", LsqMethod::Cholesky)] {
        methods.push((name.to_string(), outcome(run_lsq(p, m).map(|r| r.solution))));
    }
    let discrepancies = pairwise(&methods);
    let all_failed = methods.iter().all(|(_, o)| !matches!(o, Outcome::Solved(_)));
    if all_failed {
        let diagnosis = build_normal(p).ok().map(|(n, c)| {
            let aug = n.augment(&c).expect("normal system is square");
            classify_failure(&aug.with_kind(ScalarKind::Exact))
        });
        return VerificationReport {
            kind,
            methods,
            discrepancies,
            checks: Vec::new(),
            consistent_failure: true,
            diagnosis,
        };
    }
    let mut checks = vec![agreement_check(kind, &discrepancies)];
    if kind == ScalarKind::Exact {
        if let Some((_, x)) = methods.iter().find_map(|(m, o)| match o {
            Outcome::Solved(x) => Some((m, x)),
            _ => None,
        }) {
            match p.case {
                LsqCase::Case1 => {
                    let r: Vec<Scalar> = exact_residual(&p.a, x, &p.b).into_iter().map(Scalar::Exact).collect();
                    let g = mat_vec(&p.a.transpose(), &r).map(|g| g.iter().all(Scalar::is_zero)).unwrap_or(false);
                    checks.push(check("normal equations", g, "A\u{1d57}(b \u{2212} A·x) = 0"));
                    let ss: Rational = exact_residual(&p.a, x, &p.b).iter().map(|r| r * r).sum();
                    let min = bracket_init(&p.a, &p.b)
                        .and_then(|t| bracket_reduce_full(&t))
                        .ok()
                        .and_then(|t| t.minimum().map(Scalar::to_rational));
                    checks.push(check("[nn,\u{3bc}]", min.as_ref() == Some(&ss), format!("residual sum of squares {}", Scalar::Exact(ss))));
                }
                LsqCase::Case2 => {
                    let ok = exact_residual(&p.a, x, &p.b).iter().all(Zero::is_zero);
                    checks.push(check("feasibility", ok, "A·x = b"));
                }
            }
        }
    }
    VerificationReport {
        kind,
        methods,
        discrepancies,
        checks,
        consistent_failure: false,
        diagnosis: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{exact_vector, Matrix};

    #[test]
    fn schoolbook_example_agrees_everywhere() {
        let sys = LinearSystem::from_i64(&[&[1, 2, 1, 3], &[1, 1, 2, 9], &[2, 1, 1, 16]]);
        let r = verify_all(&Problem::Linear(sys));
        assert!(r.passed(), "{}", r.render());
        for m in ["schoolbook", "rolle", "fraction-free", "ldu", "crout", "dwyer", "satterthwaite"] {
            assert_eq!(r.solution(m), Some(&exact_vector(&[9, -4, 2])), "{m}");
        }
    }

    #[test]
    fn inconsistent_system_fails_everywhere() {
        let sys = LinearSystem::from_i64(&[&[1, 1, 1], &[1, 1, 2]]);
        let r = verify_all(&Problem::Linear(sys));
        assert!(r.consistent_failure);
        assert!(!r.passed());
        assert_eq!(r.diagnosis, Some(Error::Inconsistent { row: 2 }));
        assert!(r.render().contains("consistent-failure"));
    }

    #[test]
    fn least_squares_agree() {
        let p = LsqProblem::new(LsqCase::Case1, Matrix::from_i64(&[&[1, 0], &[1, 1], &[1, 2]]), exact_vector(&[1, 2, 4])).unwrap();
        let r = verify_all(&Problem::LeastSquares(p));
        assert!(r.passed(), "{}", r.render());
    }
}
