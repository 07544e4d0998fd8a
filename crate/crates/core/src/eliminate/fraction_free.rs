//! Double-multiply elimination and numbered derivations of new equations
//! from old ones.

use crate::error::{Error, Result};
use crate::ldu::{back_sub, ElementaryStep, TraceLog};
use crate::matrix::ColumnVector;
use crate::ops::Arith;
use crate::scalar::{Rational, Scalar, ScalarKind, MINUS};

use super::{classify_failure, render_equation, schoolbook_solve, LinearSystem};

/// One numbered equation: either original (no terms) or a linear
/// combination of earlier equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedRow {
    pub number: usize,
    pub terms: Vec<(Rational, usize)>,
    /// Coefficients followed by the right-hand side.
    pub values: Vec<Scalar>,
}

/// A numbered list of equations with the provenance of every new one, as
/// the Renaissance algebraists wrote them ("3 × 2. − 1. ⇒ 4.").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub names: Vec<String>,
    pub rows: Vec<DerivedRow>,
}

impl Derivation {
    pub fn new(sys: &LinearSystem) -> Self {
        let exact = sys.with_kind(ScalarKind::Exact);
        let aug = exact.augmented();
        let rows = (0..aug.rows())
            .map(|i| DerivedRow {
                number: i + 1,
                terms: Vec::new(),
                values: aug.row(i).to_vec(),
            })
            .collect();
        Self {
            names: sys.names.clone(),
            rows,
        }
    }

    pub fn row(&self, number: usize) -> Option<&DerivedRow> {
        self.rows.iter().find(|r| r.number == number)
    }

    /// Appends `Σ c·row` and returns the new row's number.
    pub fn combine(&mut self, terms: &[(Rational, usize)]) -> Result<usize> {
        if terms.is_empty() {
            return Err(Error::InvalidStep("empty combination".into()));
        }
        let width = self.rows[0].values.len();
        let mut acc = vec![Rational::default(); width];
        for (c, source) in terms {
            let row = self
                .row(*source)
                .ok_or_else(|| Error::InvalidStep(format!("no equation {source}")))?;
            for (a, v) in acc.iter_mut().zip(&row.values) {
                *a += c * v.to_rational();
            }
        }
        let number = self.rows.last().map_or(1, |r| r.number + 1);
        self.rows.push(DerivedRow {
            number,
            terms: terms.to_vec(),
            values: acc.into_iter().map(Scalar::Exact).collect(),
        });
        Ok(number)
    }

    /// Provenance text such as `11 × 5. − 2 × 4. ⇒ 6.`; empty for originals.
    pub fn provenance(&self, row: &DerivedRow) -> String {
        if row.terms.is_empty() {
            return String::new();
        }
        let mut out = String::new();
        for (i, (c, source)) in row.terms.iter().enumerate() {
            let negative = c < &Rational::default();
            let mag = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push(MINUS);
                }
            } else {
                out.push_str(if negative { " \u{2212} " } else { " + " });
            }
            if mag != Rational::from_integer(1.into()) {
                out.push_str(&Scalar::Exact(mag).render_table());
                out.push_str(" \u{00d7} ");
            }
            out.push_str(&format!("{source}."));
        }
        out.push_str(&format!(" \u{21d2} {}.", row.number));
        out
    }

    pub fn equation(&self, row: &DerivedRow) -> String {
        let w = row.values.len();
        render_equation(&row.values[..w - 1], &row.values[w - 1], &self.names)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let prov = self.provenance(row);
            let head = if prov.is_empty() { format!("{}.", row.number) } else { prov };
            out.push_str(&format!("{head:>22}  {}\n", self.equation(row)));
        }
        out
    }

    /// Whether every coefficient of every equation is an integer.
    pub fn all_integer(&self) -> bool {
        self.rows.iter().all(|r| r.values.iter().all(Scalar::is_integer))
    }

    /// Solves the square system formed by the listed equations, e.g. the
    /// rows a historical author chose for back substitution.
    pub fn solve_from(&self, numbers: &[usize]) -> Result<ColumnVector> {
        let rows = numbers
            .iter()
            .map(|&k| {
                self.row(k)
                    .map(|r| r.values.clone())
                    .ok_or_else(|| Error::InvalidArgument(format!("no equation {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let aug = crate::matrix::Matrix::from_rows(rows)?;
        let (a, b) = aug.split_last_column();
        let sys = LinearSystem::new(a, b, self.names.clone())?;
        Ok(schoolbook_solve(&sys, true)?.solution)
    }
}

/// Outcome of double-multiply elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionFree {
    pub solution: ColumnVector,
    pub log: TraceLog,
    pub derivation: Derivation,
    /// Equation numbers of the final triangular system, first to last.
    pub pivot_rows: Vec<usize>,
}

impl FractionFree {
    /// The last pivot equation, e.g. `150C = 750`.
    pub fn last_row(&self) -> &DerivedRow {
        let last = *self.pivot_rows.last().expect("nonempty system");
        self.derivation.row(last).expect("pivot rows exist")
    }
}

/// Elimination by `row_j ← a_kk·row_j − a_jk·row_k`: integer input stays
/// integer until the final back substitution. Common factors are kept.
pub fn fraction_free_solve(sys: &LinearSystem) -> Result<FractionFree> {
    sys.require_square()?;
    let sys = sys.with_kind(ScalarKind::Exact);
    let n = sys.n();
    let mut ar = Arith::new(ScalarKind::Exact);
    let mut work = sys.augmented();
    let mut log = TraceLog::new(work.clone());
    log.stages[0].label = "original system".into();
    let mut derivation = Derivation::new(&sys);
    let mut numbers: Vec<usize> = (1..=n).collect();
    for k in 0..n {
        if work.get(k, k).is_zero() {
            match (k + 1..n).find(|&r| !work.get(r, k).is_zero()) {
                Some(r) => {
                    work.swap_rows(k, r);
                    numbers.swap(k, r);
                    log.steps.push(ElementaryStep::Swap { a: k, b: r });
                }
                None => return Err(classify_failure(&work)),
            }
        }
        let mut changed = false;
        for j in k + 1..n {
            let ajk = work.get(j, k).clone();
            if ajk.is_zero() {
                continue;
            }
            let akk = work.get(k, k).clone();
            if !akk.is_one() {
                let step = ElementaryStep::Scale {
                    row: j,
                    factor: akk.clone(),
                };
                step.apply(&mut work, &mut ar)?;
                log.steps.push(step);
            }
            let step = ElementaryStep::SubtractMultiple {
                target: j,
                source: k,
                multiplier: ajk.clone(),
                column: k,
            };
            step.apply(&mut work, &mut ar)?;
            log.steps.push(step);
            numbers[j] = derivation.combine(&[(akk.to_rational(), numbers[j]), (-ajk.to_rational(), numbers[k])])?;
            changed = true;
        }
        if changed {
            log.push_stage(format!("{} eliminated", sys.names[k]), &work);
        }
    }
    let (upper, c) = work.split_last_column();
    let solution = back_sub(&upper, &c)?;
    log.counter = ar.counter();
    Ok(FractionFree {
        solution,
        log,
        derivation,
        pivot_rows: numbers,
    })
}

/// Replays a scripted list of combinations; each entry lists
/// `(coefficient, equation number)` pairs and creates the next equation.
pub fn replay_combinations(sys: &LinearSystem, script: &[Vec<(i64, usize)>]) -> Result<Derivation> {
    let mut d = Derivation::new(sys);
    for terms in script {
        let terms: Vec<_> = terms
            .iter()
            .map(|&(c, k)| (Rational::from_integer(c.into()), k))
            .collect();
        d.combine(&terms)?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;
    use crate::scalar::ratio;

    #[test]
    fn nine_chapters() {
        let sys = LinearSystem::from_i64(&[&[3, 2, 1, 39], &[2, 3, 1, 34], &[1, 2, 3, 26]]);
        let out = fraction_free_solve(&sys).unwrap();
        let x: Vec<Rational> = out.solution.iter().map(Scalar::to_rational).collect();
        assert_eq!(x, vec![ratio(37, 4), ratio(17, 4), ratio(11, 4)]);
        assert_eq!(out.last_row().values, exact_vector(&[0, 0, 36, 99]));
        assert!(out.derivation.all_integer());
        assert!(out.log.replays());
    }

    #[test]
    fn buteo_rows_and_provenance() {
        let sys = LinearSystem::from_i64(&[&[3, 1, 1, 42], &[1, 4, 1, 32], &[1, 1, 5, 40]])
            .with_names(&["A", "B", "C"])
            .unwrap();
        let out = fraction_free_solve(&sys).unwrap();
        let d = &out.derivation;
        assert_eq!(d.row(4).unwrap().values, exact_vector(&[0, 11, 2, 54]));
        assert_eq!(d.row(5).unwrap().values, exact_vector(&[0, 2, 14, 78]));
        assert_eq!(d.equation(d.row(6).unwrap()), "150C = 750");
        assert_eq!(d.provenance(d.row(4).unwrap()), "3 \u{d7} 2. \u{2212} 1. \u{21d2} 4.");
        assert_eq!(d.provenance(d.row(6).unwrap()), "11 \u{d7} 5. \u{2212} 2 \u{d7} 4. \u{21d2} 6.");
        assert_eq!(out.pivot_rows, vec![1, 4, 6]);
        assert_eq!(out.solution, exact_vector(&[11, 4, 5]));
        assert_eq!(d.solve_from(&[6, 5, 3]).unwrap(), exact_vector(&[11, 4, 5]));
    }

    #[test]
    fn peletier_script() {
        let sys = LinearSystem::from_i64(&[&[2, 1, 1, 64], &[1, 3, 1, 84], &[1, 1, 4, 124]])
            .with_names(&["R", "A", "B"])
            .unwrap();
        let script = vec![
            vec![(1, 2), (1, 3)],
            vec![(1, 4), (-1, 1)],
            vec![(1, 1), (1, 2)],
            vec![(1, 1), (1, 3)],
            vec![(1, 6), (1, 7)],
            vec![(6, 3)],
            vec![(1, 9), (-1, 8)],
        ];
        let d = replay_combinations(&sys, &script).unwrap();
        assert_eq!(d.equation(d.row(10).unwrap()), "17B = 408");
        assert_eq!(d.provenance(d.row(9).unwrap()), "6 \u{d7} 3. \u{21d2} 9.");
        assert_eq!(d.solve_from(&[10, 5, 1]).unwrap(), exact_vector(&[12, 16, 24]));
        let ff = fraction_free_solve(&sys).unwrap();
        assert_eq!(ff.last_row().values, exact_vector(&[0, 0, 34, 816]));
    }

    #[test]
    fn zero_lead_swaps_or_fails() {
        let sys = LinearSystem::from_i64(&[&[0, 2, 4], &[3, 1, 5]]);
        assert_eq!(fraction_free_solve(&sys).unwrap().solution, exact_vector(&[1, 2]));
        let bad = LinearSystem::from_i64(&[&[0, 2, 4], &[0, 1, 5]]);
        assert!(fraction_free_solve(&bad).is_err());
    }
}
