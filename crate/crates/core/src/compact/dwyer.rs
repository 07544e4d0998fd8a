//! The method of single division: at each stage the leading row is divided
//! by its pivot, and the divided row, times each remaining row's leading
//! coefficient, is subtracted from that row. Back substitution reuses the
//! divided rows.

use crate::error::{Error, Result};
use crate::matrix::{check_kinds, ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::Scalar;

use super::tableau::{Cell, Layout, Tableau, TableauRow};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DwyerSolution {
    pub x: ColumnVector,
    pub tableau: Tableau,
}

pub const ORIGINAL: &str = "original equations";
pub const BACK_SUBSTITUTION: &str = "back-substitution";

pub fn elimination_note(part: usize) -> String {
    format!("elimination, part {part}")
}

fn columns(n: usize) -> Vec<String> {
    let mut cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    cols.push("r.h.s.".into());
    cols
}

fn cells_from(values: &[Scalar], from: usize) -> Vec<Cell> {
    values
        .iter()
        .enumerate()
        .map(|(j, v)| if j < from { Cell::Empty } else { Cell::Value(v.clone()) })
        .collect()
}

/// Solves in natural pivot order, in the arithmetic of `a`. The table
/// numbers every row and names the rows it came from.
pub fn dwyer_single_division(a: &Matrix, b: &[Scalar]) -> Result<DwyerSolution> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    check_kinds(a.kind(), b)?;
    let aug = a.augment(b)?;
    let n = a.rows();
    let mut ar = Arith::new(a.kind());
    let mut t = Tableau::new(Layout::Dwyer, a.kind(), columns(n), vec![0, n, n + 1]);
    let mut step = 0;

    let mut current: Vec<(usize, Vec<Scalar>)> = Vec::new();
    for i in 0..n {
        step += 1;
        let row = aug.row(i).to_vec();
        let mut r = TableauRow::new(cells_from(&row, 0)).step(step);
        if i == 0 {
            r = r.note(ORIGINAL);
        }
        t.push(r);
        current.push((step, row));
    }

    let mut divided: Vec<(usize, Vec<Scalar>)> = Vec::new();
    for k in 0..n {
        let (lead_step, lead) = current[0].clone();
        let pivot = &lead[k];
        if ar.is_negligible(pivot) {
            return Err(Error::Singular { step: k + 1 });
        }
        let mut d = vec![ar.zero(); n + 1];
        d[k] = ar.one();
        for j in k + 1..=n {
            d[j] = ar.div(&lead[j], pivot)?;
        }
        step += 1;
        let note = if k + 1 < n {
            elimination_note(k + 1)
        } else {
            BACK_SUBSTITUTION.to_string()
        };
        t.push(TableauRow::new(cells_from(&d, k)).step(step).sources(vec![lead_step]).note(note));
        divided.push((step, d.clone()));

        let mut next = Vec::new();
        for (target_step, row) in &current[1..] {
            let mut e = vec![ar.zero(); n + 1];
            for j in k + 1..=n {
                e[j] = ar.dot_sub(&row[j], [(&row[k], &d[j])]);
            }
            step += 1;
            t.push(TableauRow::new(cells_from(&e, k + 1)).step(step).sources(vec![step_of(&divided, k), *target_step]));
            next.push((step, e));
        }
        current = next;
    }

    // The last divided row already gives x_n; every other unknown comes from
    // its divided row and the solution rows written so far.
    let mut x = vec![ar.zero(); n];
    x[n - 1] = divided[n - 1].1[n].clone();
    let mut solution_steps = vec![divided[n - 1].0];
    for k in (0..n - 1).rev() {
        let (dstep, d) = &divided[k];
        let pairs: Vec<(Scalar, Scalar)> = (k + 1..n).rev().map(|j| (d[j].clone(), x[j].clone())).collect();
        x[k] = ar.dot_sub(&d[n], pairs.iter().map(|(p, q)| (p, q)));
        let mut cells = vec![Cell::Empty; n + 1];
        cells[k] = Cell::Value(ar.one());
        cells[n] = Cell::Value(x[k].clone());
        let mut sources = vec![*dstep];
        sources.extend(&solution_steps);
        step += 1;
        t.push(TableauRow::new(cells).step(step).sources(sources));
        solution_steps.push(step);
    }
    Ok(DwyerSolution { x, tableau: t })
}

fn step_of(divided: &[(usize, Vec<Scalar>)], k: usize) -> usize {
    divided[k].0
}

/// Recomputes every derived row of a single-division table from the rows it
/// names, in the table's own arithmetic.
pub fn replay_dwyer(t: &Tableau) -> Result<bool> {
    if t.layout != Layout::Dwyer {
        return Err(Error::InvalidArgument(format!("expected a single-division table, got {}", t.layout)));
    }
    let width = t.columns.len();
    let n = width - 1;
    let mut ar = Arith::new(t.kind);
    let mut in_back = false;
    let values = |row: &TableauRow| -> Vec<Option<Scalar>> { row.cells.iter().map(|c| c.value().cloned()).collect() };
    let lead_of = |row: &TableauRow| row.cells[..n].iter().position(|c| !c.is_empty());
    let mut solved: Vec<Option<Scalar>> = vec![None; n];
    for row in &t.rows {
        if row.note.as_deref() == Some(BACK_SUBSTITUTION) {
            in_back = true;
        }
        let src: Option<Vec<&TableauRow>> = row.sources.iter().map(|&s| t.by_step(s)).collect();
        let Some(src) = src else { return Ok(false) };
        let got = values(row);
        let expect: Vec<Option<Scalar>> = match src.as_slice() {
            [] => continue,
            [lead] => {
                let Some(k) = lead_of(lead) else { return Ok(false) };
                let v = values(lead);
                let Some(pivot) = v[k].clone() else { return Ok(false) };
                let mut e = vec![None; width];
                e[k] = Some(ar.one());
                for j in k + 1..width {
                    let Some(num) = &v[j] else { return Ok(false) };
                    e[j] = Some(ar.div(num, &pivot)?);
                }
                e
            }
            [d, rest @ ..] if in_back => {
                let Some(k) = lead_of(d) else { return Ok(false) };
                let dv = values(d);
                let mut pairs = Vec::new();
                for s in rest {
                    let Some(j) = lead_of(s) else { return Ok(false) };
                    let (Some(c), Some(xj)) = (dv[j].clone(), solved[j].clone()) else {
                        return Ok(false);
                    };
                    pairs.push((c, xj));
                }
                let Some(rhs) = &dv[n] else { return Ok(false) };
                let mut e = vec![None; width];
                e[k] = Some(ar.one());
                e[n] = Some(ar.dot_sub(rhs, pairs.iter().map(|(p, q)| (p, q))));
                e
            }
            [d, target] => {
                let Some(k) = lead_of(d) else { return Ok(false) };
                let (dv, tv) = (values(d), values(target));
                let Some(m) = tv[k].clone() else { return Ok(false) };
                let mut e = vec![None; width];
                for j in k + 1..width {
                    let (Some(dj), Some(tj)) = (&dv[j], &tv[j]) else { return Ok(false) };
                    e[j] = Some(ar.dot_sub(tj, [(&m, dj)]));
                }
                e
            }
            _ => return Ok(false),
        };
        if expect != got {
            return Ok(false);
        }
        if in_back {
            if let Some(k) = lead_of(row) {
                solved[k] = got[n].clone();
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eliminate::{schoolbook_solve, LinearSystem};
    use crate::matrix::exact_vector;
    use crate::scalar::{PrecisionSpec, ScalarKind};

    fn dwyer_problem(kind: ScalarKind) -> (Matrix, Vec<Scalar>) {
        let rows = [
            ["1", ".4", ".5", ".6", ".2"],
            [".4", "1", ".3", ".4", ".4"],
            [".5", ".3", "1", ".2", ".6"],
            [".6", ".4", ".2", "1", ".8"],
        ];
        let parsed: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|s| Scalar::parse(s, kind).unwrap()).collect())
            .collect();
        let aug = Matrix::from_rows(parsed).unwrap();
        let (a, b) = aug.split_last_column();
        (a, b)
    }

    fn rendered(row: &TableauRow) -> Vec<String> {
        row.cells.iter().filter(|c| !c.is_empty()).map(Cell::render).collect()
    }

    #[test]
    fn four_digit_figure_rows() {
        let kind = ScalarKind::Fixed(PrecisionSpec::fractional(4).unwrap());
        let (a, b) = dwyer_problem(kind);
        let s = dwyer_single_division(&a, &b).unwrap();
        let t = &s.tableau;
        assert_eq!(t.rows.len(), 17);
        assert_eq!(rendered(t.by_step(6).unwrap()), vec![".8400", ".1000", ".1600", ".3200"]);
        assert_eq!(t.by_step(6).unwrap().sources, vec![5, 2]);
        assert_eq!(rendered(t.by_step(10).unwrap()), vec![".7381", "\u{2212}.1190", ".4619"]);
        assert_eq!(rendered(t.by_step(12).unwrap()), vec!["1.0000", "\u{2212}.1612", ".6258"]);
        assert_eq!(t.by_step(12).unwrap().note.as_deref(), Some("elimination, part 3"));
        assert_eq!(t.by_step(15).unwrap().sources, vec![12, 14]);
        assert_eq!(t.by_step(17).unwrap().sources, vec![5, 14, 15, 16]);
        let x: Vec<String> = s.x.iter().map(Scalar::render_table).collect();
        assert_eq!(x, vec!["\u{2212}.9366", ".0602", ".8152", "1.1748"]);
        t.check_numbering().unwrap();
        assert!(replay_dwyer(t).unwrap());
    }

    #[test]
    fn exact_run_agrees_with_schoolbook() {
        let (a, b) = dwyer_problem(ScalarKind::Exact);
        let s = dwyer_single_division(&a, &b).unwrap();
        let sys = LinearSystem::unnamed(a, b).unwrap();
        assert_eq!(s.x, schoolbook_solve(&sys, false).unwrap().solution);
        assert!(replay_dwyer(&s.tableau).unwrap());
    }

    #[test]
    fn identity() {
        let a = Matrix::identity(3, ScalarKind::Exact);
        let b = exact_vector(&[4, 5, 6]);
        let s = dwyer_single_division(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert!(replay_dwyer(&s.tableau).unwrap());
    }

    #[test]
    fn tampered_row_fails_replay() {
        let (a, b) = dwyer_problem(ScalarKind::Exact);
        let mut t = dwyer_single_division(&a, &b).unwrap().tableau;
        t.rows[9].cells[3] = Cell::Value(Scalar::exact(1, 7));
        assert!(!replay_dwyer(&t).unwrap());
    }

    #[test]
    fn zero_pivot() {
        let a = Matrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(
            dwyer_single_division(&a, &exact_vector(&[1, 2])).unwrap_err(),
            Error::Singular { step: 2 }
        );
    }
}
