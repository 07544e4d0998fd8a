//! Elimination as it was done before the compact methods: schoolbook
//! elimination, double-multiply (fraction-free) elimination and Rolle's
//! two-column substitution.

mod fraction_free;
mod rolle;

pub use fraction_free::{fraction_free_solve, replay_combinations, Derivation, DerivedRow, FractionFree};
pub use rolle::{rolle_solve, RolleAssignment, RolleRow, RolleTrace};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ldu::{back_sub_with, pivot_row, ElementaryStep, TraceLog};
use crate::matrix::{check_kinds, ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::{Rational, Scalar, ScalarKind, MINUS};

/// `A·x = b` with named unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub a: Matrix,
    pub b: ColumnVector,
    pub names: Vec<String>,
}

/// Default unknown names: `x, y, z, w` for small systems, else `x1, x2, …`.
pub fn default_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl LinearSystem {
    pub fn new(a: Matrix, b: ColumnVector, names: Vec<String>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::ShapeMismatch {
                op: "system",
                left: a.shape(),
                right: (b.len(), 1),
            });
        }
        check_kinds(a.kind(), &b)?;
        if names.len() != a.cols() {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} unknowns",
                names.len(),
                a.cols()
            )));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::InvalidArgument("variable names must be distinct".into()));
        }
        Ok(Self { a, b, names })
    }

    pub fn unnamed(a: Matrix, b: ColumnVector) -> Result<Self> {
        let names = default_names(a.cols());
        Self::new(a, b, names)
    }

    /// Integer system from rows of `coefficients..., rhs`.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let aug = Matrix::from_i64(rows);
        let (a, b) = aug.split_last_column();
        Self::unnamed(a, b).expect("well-formed integer system")
    }

    pub fn with_names(mut self, names: &[&str]) -> Result<Self> {
        let names = names.iter().map(|s| s.to_string()).collect();
        self = Self::new(self.a, self.b, names)?;
        Ok(self)
    }

    pub fn kind(&self) -> ScalarKind {
        self.a.kind()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn augmented(&self) -> Matrix {
        self.a.augment(&self.b).expect("validated system")
    }

    pub fn with_kind(&self, kind: ScalarKind) -> Self {
        Self {
            a: self.a.with_kind(kind),
            b: self.b.iter().map(|v| v.convert(kind)).collect(),
            names: self.names.clone(),
        }
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if !self.a.is_square() {
            return Err(Error::NotSquare {
                rows: self.a.rows(),
                cols: self.a.cols(),
            });
        }
        Ok(())
    }
}

/// Writes `coeffs · names = rhs` the way a textbook would: `x + 2y − z = 3`.
pub fn render_equation(coeffs: &[Scalar], rhs: &Scalar, names: &[String]) -> String {
    format!("{} = {}", render_linear(coeffs.iter().zip(names).map(|(c, n)| (c.clone(), n.as_str())), None), rhs)
}

/// Renders `constant ± c₁·name₁ ± …`, dropping zero terms and unit
/// coefficients.
pub(crate) fn render_linear<'a>(terms: impl Iterator<Item = (Scalar, &'a str)>, constant: Option<&Scalar>) -> String {
    let mut out = String::new();
    if let Some(c) = constant {
        if !c.is_zero() {
            out.push_str(&c.render_table());
        }
    }
    for (c, name) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = Scalar::Exact(c.abs_rational()).convert(c.kind());
        let coef = if mag.is_one() { String::new() } else { mag.render_table() };
        if out.is_empty() {
            if c.is_negative() {
                out.push(MINUS);
            }
        } else {
            out.push_str(if c.is_negative() { " \u{2212} " } else { " + " });
        }
        out.push_str(&coef);
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Schoolbook elimination result: the solution and the successive
/// equivalent systems (augmented matrices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub solution: ColumnVector,
    pub log: TraceLog,
}

impl Elimination {
    /// Each stage of the trace as a list of equations.
    pub fn systems(&self, names: &[String]) -> Vec<(String, Vec<String>)> {
        self.log
            .stages
            .iter()
            .map(|stage| {
                let m = &stage.matrix;
                let eqs = (0..m.rows())
                    .map(|i| {
                        let row = m.row(i);
                        render_equation(&row[..row.len() - 1], &row[row.len() - 1], names)
                    })
                    .collect();
                (stage.label.clone(), eqs)
            })
            .collect()
    }
}

/// Tells a singular system from an inconsistent one by an exact echelon
/// reduction of the (partially reduced) augmented matrix.
pub(crate) fn classify_failure(aug: &Matrix) -> Error {
    let rows = aug.rows();
    let n = aug.cols() - 1;
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| aug.row(i).iter().map(Scalar::to_rational).collect())
        .collect();
    let mut order: Vec<usize> = (0..rows).collect();
    let mut r = 0;
    let mut deficient = None;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            deficient.get_or_insert(col + 1);
            continue;
        };
        m.swap(r, p);
        order.swap(r, p);
        for i in r + 1..rows {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] / &m[r][col];
            for j in col..=n {
                let v = &m[r][j] * &f;
                m[i][j] -= v;
            }
        }
        r += 1;
    }
    for i in r..rows {
        if !m[i][n].is_zero() {
            return Error::Inconsistent { row: order[i] + 1 };
        }
    }
    Error::Singular {
        step: deficient.unwrap_or(r + 1),
    }
}

/// Schoolbook elimination: the leading equation stays, multiples of it are
/// subtracted from those below, and the last unknown is found first.
pub fn schoolbook_solve(sys: &LinearSystem, pivoting: bool) -> Result<Elimination> {
    sys.require_square()?;
    let n = sys.n();
    let mut ar = Arith::new(sys.kind());
    let mut aug = sys.augmented();
    let mut log = TraceLog::new(aug.clone());
    log.stages[0].label = "original system".into();
    for i in 0..n {
        let p = if pivoting { pivot_row(&aug, i, i) } else { i };
        if p != i {
            aug.swap_rows(i, p);
            log.steps.push(ElementaryStep::Swap { a: i, b: p });
        }
        if ar.is_negligible(aug.get(i, i)) {
            if (i..n).all(|r| ar.is_negligible(aug.get(r, i))) {
                return Err(classify_failure(&aug));
            }
            return Err(Error::Singular { step: i + 1 });
        }
        let mut changed = false;
        for j in i + 1..n {
            if aug.get(j, i).is_zero() {
                continue;
            }
            let m = ar.div(aug.get(j, i), aug.get(i, i))?;
            let step = ElementaryStep::SubtractMultiple {
                target: j,
                source: i,
                multiplier: m,
                column: i,
            };
            step.apply(&mut aug, &mut ar)?;
            log.steps.push(step);
            changed = true;
        }
        if changed {
            log.push_stage(format!("{} eliminated", sys.names[i]), &aug);
        }
    }
    let (upper, c) = aug.split_last_column();
    let solution = back_sub_with(&upper, &c, &mut ar)?;
    log.counter = ar.counter();
    Ok(Elimination { solution, log })
}

fn closed_form_input(v: &[Scalar]) -> Result<ScalarKind> {
    let kind = v.first().map_or(ScalarKind::Exact, Scalar::kind);
    check_kinds(kind, v)?;
    Ok(kind)
}

/// Four numbers whose sums by threes, less the fourth, are `e`:
/// `n_i = (e₁+e₂+e₃+e₄)/4 − e_i/2`.
pub fn closed_form_diophantus(e: &[Scalar]) -> Result<ColumnVector> {
    if e.len() != 4 {
        return Err(Error::InvalidArgument(format!("expected 4 values, got {}", e.len())));
    }
    let kind = closed_form_input(e)?;
    let sum: Rational = e.iter().map(Scalar::to_rational).sum();
    let quarter = sum / Rational::from_integer(4.into());
    Ok(e.iter()
        .map(|ei| Scalar::from_rational(&quarter - ei.to_rational() / Rational::from_integer(2.into()), kind))
        .collect())
}

/// Numbers whose sums omitting one are `d`: `n_i = (d₁+…+d_n)/(n−1) − d_i`.
pub fn closed_form_aryabhata(d: &[Scalar]) -> Result<ColumnVector> {
    if d.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 values, got {}", d.len())));
    }
    let kind = closed_form_input(d)?;
    let sum: Rational = d.iter().map(Scalar::to_rational).sum();
    let share = sum / Rational::from_integer(((d.len() - 1) as i64).into());
    Ok(d.iter()
        .map(|di| Scalar::from_rational(&share - di.to_rational(), kind))
        .collect())
}

/// The linear system behind [`closed_form_diophantus`]: row `i` adds the
/// other three unknowns and subtracts the `i`-th.
pub fn diophantus_system(e: &[Scalar]) -> Result<LinearSystem> {
    if e.len() != 4 {
        return Err(Error::InvalidArgument(format!("expected 4 values, got {}", e.len())));
    }
    structured_system(e, -1)
}

/// The linear system behind [`closed_form_aryabhata`]: row `i` sums every
/// unknown except the `i`-th.
pub fn aryabhata_system(d: &[Scalar]) -> Result<LinearSystem> {
    if d.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 values, got {}", d.len())));
    }
    structured_system(d, 0)
}

fn structured_system(rhs: &[Scalar], diagonal: i64) -> Result<LinearSystem> {
    let kind = closed_form_input(rhs)?;
    let n = rhs.len();
    let mut a = Matrix::zeros(n, n, kind);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j { diagonal } else { 1 };
            a.set(i, j, Scalar::from_int(v, kind));
        }
    }
    LinearSystem::unnamed(a, rhs.to_vec())
}

/// Largest absolute difference between two vectors, exactly.
pub fn max_discrepancy(x: &[Scalar], y: &[Scalar]) -> Rational {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a.to_rational() - b.to_rational()).abs())
        .max()
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{exact_vector, residual};
    use crate::scalar::ratio;

    #[test]
    fn schoolbook_keeps_every_equivalent_system() {
        let sys = LinearSystem::from_i64(&[&[1, 2, 1, 3], &[1, 1, 2, 9], &[2, 1, 1, 16]]);
        let out = schoolbook_solve(&sys, false).unwrap();
        assert_eq!(out.solution, exact_vector(&[9, -4, 2]));
        let stages: Vec<_> = out.log.stages.iter().map(|s| s.matrix.clone()).collect();
        assert_eq!(stages.len(), 3);
        assert_eq!(stages[1], Matrix::from_i64(&[&[1, 2, 1, 3], &[0, -1, 1, 6], &[0, -3, -1, 10]]));
        assert_eq!(stages[2], Matrix::from_i64(&[&[1, 2, 1, 3], &[0, -1, 1, 6], &[0, 0, -4, -8]]));
        let systems = out.systems(&sys.names);
        assert_eq!(systems[2].1[2], "\u{2212}4z = \u{2212}8");
        assert_eq!(systems[0].1[0], "x + 2y + z = 3");
        assert!(out.log.replays());
    }

    #[test]
    fn babylonian_fields() {
        let kind = ScalarKind::Exact;
        let a = Matrix::from_rationals(2, 2, vec![ratio(1, 1), ratio(1, 1), ratio(2, 3), ratio(-1, 2)], kind).unwrap();
        let sys = LinearSystem::unnamed(a, exact_vector(&[1800, 500])).unwrap();
        assert_eq!(schoolbook_solve(&sys, false).unwrap().solution, exact_vector(&[1200, 600]));
    }

    #[test]
    fn singular_and_inconsistent_differ() {
        let inconsistent = LinearSystem::from_i64(&[&[1, 1, 1], &[1, 1, 2]]);
        assert_eq!(schoolbook_solve(&inconsistent, true), Err(Error::Inconsistent { row: 2 }));
        let singular = LinearSystem::from_i64(&[&[1, 1, 1], &[2, 2, 2]]);
        assert_eq!(schoolbook_solve(&singular, true), Err(Error::Singular { step: 2 }));
        let zero_lead = LinearSystem::from_i64(&[&[0, 1, 1], &[1, 0, 2]]);
        assert_eq!(schoolbook_solve(&zero_lead, false), Err(Error::Singular { step: 1 }));
        assert_eq!(schoolbook_solve(&zero_lead, true).unwrap().solution, exact_vector(&[2, 1]));
    }

    #[test]
    fn closed_forms() {
        let e = exact_vector(&[20, 30, 40, 50]);
        let n = closed_form_diophantus(&e).unwrap();
        assert_eq!(n, exact_vector(&[25, 20, 15, 10]));
        let sys = diophantus_system(&e).unwrap();
        assert!(residual(&sys.a, &n, &e).unwrap().iter().all(Scalar::is_zero));
        let d = exact_vector(&[10, 20, 30]);
        assert_eq!(closed_form_aryabhata(&d).unwrap(), exact_vector(&[20, 10, 0]));
        assert_eq!(closed_form_diophantus(&exact_vector(&[0; 4])).unwrap(), exact_vector(&[0; 4]));
        assert!(closed_form_aryabhata(&exact_vector(&[1])).is_err());
    }

    #[test]
    fn equation_text() {
        let names = default_names(3);
        let eq = render_equation(&exact_vector(&[0, -1, 3]), &Scalar::exact(-1, 2), &names);
        assert_eq!(eq, "\u{2212}y + 3z = \u{2212}1/2");
        assert_eq!(render_equation(&exact_vector(&[0, 0, 0]), &Scalar::exact(0, 1), &names), "0 = 0");
    }
}
