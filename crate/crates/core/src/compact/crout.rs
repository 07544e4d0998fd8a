//! Crout's single auxiliary table: every entry is one continuous machine
//! operation on the augmented matrix.

use crate::eliminate::default_names;
use crate::error::{Error, Result};
use crate::matrix::{check_kinds, ColumnVector, Matrix};
use crate::ops::{Arith, OpCounter};
use crate::scalar::Scalar;

use super::tableau::{Cell, Layout, Tableau, TableauRow};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CroutSolution {
    pub x: ColumnVector,
    pub tableau: Tableau,
    /// Operations spent filling the table.
    pub tableau_counter: OpCounter,
    /// Everything, back substitution included.
    pub counter: OpCounter,
}

/// Rules 1–3 fill the table column-then-row: an entry on or below the
/// diagonal is its original reduced by the sum of products of its row to the
/// left and its column above; an entry to the right of the diagonal is
/// reduced the same way and divided by the diagonal entry of its row. Rule 4
/// back-substitutes through the right-hand part.
pub fn crout_solve(a: &Matrix, b: &[Scalar]) -> Result<CroutSolution> {
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
    let mut t = Matrix::zeros(n, n + 1, a.kind());
    for k in 0..n {
        for i in k..n {
            let left: Vec<Scalar> = t.row(i)[..k].to_vec();
            let above: Vec<Scalar> = (0..k).map(|m| t.get(m, k).clone()).collect();
            let v = ar.dot_sub(aug.get(i, k), left.iter().zip(&above));
            t.set(i, k, v);
        }
        let pivot = t.get(k, k).clone();
        if ar.is_negligible(&pivot) {
            return Err(Error::Singular { step: k + 1 });
        }
        let left: Vec<Scalar> = t.row(k)[..k].to_vec();
        for j in k + 1..=n {
            let above: Vec<Scalar> = (0..k).map(|m| t.get(m, j).clone()).collect();
            let v = ar.dot_sub_div(aug.get(k, j), left.iter().zip(&above), &pivot)?;
            t.set(k, j, v);
        }
    }
    let tableau_counter = ar.counter();
    let mut x = vec![ar.zero(); n];
    for i in (0..n).rev() {
        let right: Vec<Scalar> = t.row(i)[i + 1..n].to_vec();
        x[i] = ar.dot_sub(t.get(i, n), right.iter().zip(&x[i + 1..]));
    }

    let mut cols = default_names(n);
    cols.push("r.h.s.".into());
    let mut tableau = Tableau::new(Layout::Crout, a.kind(), cols, vec![n]);
    for i in 0..n {
        let cells = t.row(i).iter().cloned().map(Cell::Value).collect();
        tableau.push(TableauRow::new(cells).label((i + 1).to_string()));
    }
    Ok(CroutSolution {
        x,
        tableau,
        tableau_counter,
        counter: ar.counter(),
    })
}

/// Crout's table refers back to the original coefficients, so replaying it
/// needs them.
pub fn replay_crout(t: &Tableau, a: &Matrix, b: &[Scalar]) -> Result<bool> {
    if t.layout != Layout::Crout {
        return Err(Error::InvalidArgument(format!("expected a Crout table, got {}", t.layout)));
    }
    Ok(crout_solve(a, b)?.tableau.rows == t.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldu::ldu_decompose;
    use crate::matrix::exact_vector;
    use crate::scalar::{PrecisionSpec, ScalarKind};

    #[test]
    fn identity_tableau_is_the_input() {
        let a = Matrix::identity(3, ScalarKind::Exact);
        let b = exact_vector(&[1, 2, 3]);
        let s = crout_solve(&a, &b).unwrap();
        assert_eq!(s.x, b);
        for (i, row) in s.tableau.rows.iter().enumerate() {
            let expect: Vec<Scalar> = a.augment(&b).unwrap().row(i).to_vec();
            assert_eq!(row.values(), expect.iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn schoolbook_example_matches_ldu() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]);
        let b = exact_vector(&[7, 8, 27]);
        let s = crout_solve(&a, &b).unwrap();
        let (f, _) = ldu_decompose(&a, false).unwrap();
        let ld = f.lower_scaled();
        for i in 0..3 {
            for j in 0..3 {
                let cell = s.tableau.rows[i].cells[j].value().unwrap();
                if j <= i {
                    assert_eq!(cell, ld.get(i, j));
                } else {
                    assert_eq!(cell, f.u.get(i, j));
                }
            }
        }
        assert!(replay_crout(&s.tableau, &a, &b).unwrap());
    }

    #[test]
    fn one_rounding_per_entry() {
        let kind = ScalarKind::Fixed(PrecisionSpec::fractional(4).unwrap());
        let a = Matrix::from_i64(&[&[3, 1, 2], &[1, 4, 1], &[2, 1, 5]]).with_kind(kind);
        let b: Vec<Scalar> = exact_vector(&[1, 2, 3]).iter().map(|v| v.convert(kind)).collect();
        let s = crout_solve(&a, &b).unwrap();
        assert_eq!(s.tableau_counter.roundings, 12);
    }

    #[test]
    fn zero_diagonal() {
        let a = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(crout_solve(&a, &exact_vector(&[1, 1])).unwrap_err(), Error::Singular { step: 1 });
    }
}
