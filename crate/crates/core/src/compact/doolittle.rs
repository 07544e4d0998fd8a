//! Doolittle's tables: A and B for the forward pass, C and D for back
//! substitution, E and F for iterative refinement.
//!
//! The normal equations are taken in Doolittle's form `0 = N·x + n`, where
//! `n` is the column of absolute terms.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{check_kinds, max_norm, ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::{Rational, Scalar, ScalarKind};

use super::tableau::{Cell, Layout, Tableau, TableauRow};

/// Unknown names in Doolittle's style: `w, x, y, z` for up to four.
pub fn doolittle_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["w", "x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn check_normal(n: &Matrix, absolute: &[Scalar]) -> Result<()> {
    if !n.is_square() {
        return Err(Error::NotSquare {
            rows: n.rows(),
            cols: n.cols(),
        });
    }
    if absolute.len() != n.rows() {
        return Err(Error::ShapeMismatch {
            op: "doolittle",
            left: n.shape(),
            right: (absolute.len(), 1),
        });
    }
    check_kinds(n.kind(), absolute)?;
    if !n.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// Forms tables A and B. Table A alternates pivot rows (`[aa] [ab] …`,
/// `[bb,1] …`) with explicit-function rows (reciprocal `−1/pivot` and the
/// negated ratios); every pivot row after the first is the column sum of a
/// block of table B, each of whose rows is one multiplier times part of an
/// earlier pivot row.
pub fn doolittle_forward(n: &Matrix, absolute: &[Scalar]) -> Result<(Tableau, Tableau)> {
    doolittle_forward_with(n, absolute, &mut Arith::new(n.kind()))
}

pub fn doolittle_forward_with(n: &Matrix, absolute: &[Scalar], ar: &mut Arith) -> Result<(Tableau, Tableau)> {
    check_normal(n, absolute)?;
    let size = n.rows();
    let kind = n.kind();
    let names = doolittle_names(size);
    let mut a_cols = vec!["reciprocal".to_string()];
    a_cols.extend(names.iter().cloned());
    a_cols.push("absolute term".into());
    let mut ta = Tableau::new(Layout::DoolittleA, kind, a_cols, vec![1, size + 1]);
    let mut b_cols: Vec<String> = names[1..].to_vec();
    b_cols.push("absolute term".into());
    let mut tb = Tableau::new(Layout::DoolittleB, kind, b_cols, vec![size - 1]);

    // Pivot rows and explicit rows as full-width vectors over `names + abs`.
    let mut pivot_rows: Vec<(usize, Vec<Scalar>)> = Vec::new();
    let mut explicit_rows: Vec<(usize, Vec<Scalar>)> = Vec::new();
    let mut step = 0;
    let minus_one = Scalar::from_int(-1, kind);
    let row_of = |i: usize| -> Vec<Scalar> {
        let mut v = n.row(i).to_vec();
        v.push(absolute[i].clone());
        v
    };
    for k in 0..size {
        let pivot_row = if k == 0 {
            row_of(0)
        } else {
            let mut block: Vec<(usize, Vec<Scalar>)> = Vec::new();
            step += 1;
            block.push((step, row_of(k)));
            let mut cells = vec![Cell::Empty; size];
            for j in k..=size {
                cells[j - 1] = Cell::Value(row_of(k)[j].clone());
            }
            tb.push(TableauRow::new(cells).step(step));
            for i in 0..k {
                let m = explicit_rows[i].1[k].clone();
                let (pstep, prow) = &pivot_rows[i];
                let mut product = vec![ar.zero(); size + 1];
                let mut cells = vec![Cell::Empty; size];
                for j in k..=size {
                    product[j] = ar.mul(&m, &prow[j]);
                    cells[j - 1] = Cell::Value(product[j].clone());
                }
                step += 1;
                tb.push(TableauRow::new(cells).step(step).sources(vec![explicit_rows[i].0, *pstep]));
                block.push((step, product));
            }
            let mut sum = vec![ar.zero(); size + 1];
            for (j, s) in sum.iter_mut().enumerate().skip(k) {
                *s = ar.sum(block.iter().map(|(_, r)| &r[j]));
            }
            sum
        };
        let sources = if k == 0 {
            Vec::new()
        } else {
            tb.rows.iter().rev().take(k + 1).filter_map(|r| r.step).rev().collect()
        };
        step += 1;
        let mut cells = vec![Cell::Empty; size + 2];
        for j in k..=size {
            cells[j + 1] = Cell::Value(pivot_row[j].clone());
        }
        ta.push(TableauRow::new(cells).step(step).sources(sources));
        let pivot_step = step;
        let pivot = pivot_row[k].clone();
        if pivot.is_zero() || pivot.is_negative() || ar.is_negligible(&pivot) {
            return Err(Error::NotPositiveDefinite { step: k + 1 });
        }
        let recip = ar.div(&minus_one, &pivot)?;
        let mut explicit = vec![ar.zero(); size + 1];
        let mut cells = vec![Cell::Empty; size + 2];
        cells[0] = Cell::Value(recip.clone());
        cells[k + 1] = Cell::Text(format!("{} =", names[k]));
        for j in k + 1..=size {
            explicit[j] = ar.mul(&pivot_row[j], &recip);
            cells[j + 1] = Cell::Value(explicit[j].clone());
        }
        step += 1;
        ta.push(TableauRow::new(cells).step(step).sources(vec![pivot_step]));
        pivot_rows.push((pivot_step, pivot_row));
        explicit_rows.push((step, explicit));
    }
    Ok((ta, tb))
}

/// What table A holds for each stage: the reciprocal, the explicit-function
/// coefficients (indexed by unknown) and the explicit constant.
struct Explicit {
    reciprocal: Scalar,
    coeffs: Vec<Scalar>,
    constant: Scalar,
}

fn read_table_a(ta: &Tableau) -> Result<(Vec<String>, Vec<Explicit>, Vec<Scalar>)> {
    if ta.layout != Layout::DoolittleA {
        return Err(Error::InvalidArgument(format!("expected table A, got {}", ta.layout)));
    }
    let size = ta.columns.len() - 2;
    let names = ta.columns[1..=size].to_vec();
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    for (k, pair) in ta.rows.chunks(2).enumerate() {
        let [pivot_row, explicit_row] = pair else {
            return Err(Error::InvalidArgument("table A has an unpaired row".into()));
        };
        let value = |row: &TableauRow, c: usize| -> Result<Scalar> {
            row.cells[c]
                .value()
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("table A is missing a value in column {c}")))
        };
        pivots.push(value(pivot_row, k + 1)?);
        let reciprocal = value(explicit_row, 0)?;
        let coeffs = (0..size)
            .map(|j| if j > k { value(explicit_row, j + 1) } else { Ok(Scalar::zero(ta.kind)) })
            .collect::<Result<Vec<_>>>()?;
        let constant = value(explicit_row, size + 1)?;
        out.push(Explicit {
            reciprocal,
            coeffs,
            constant,
        });
    }
    if out.len() != size {
        return Err(Error::InvalidArgument("table A is incomplete".into()));
    }
    Ok((names, out, pivots))
}

fn table_c(names: &[String], ex: &[Explicit], kind: ScalarKind) -> Tableau {
    let size = names.len();
    let mut cols = vec!["reciprocal".to_string()];
    cols.extend(names[1..].iter().cloned());
    let mut tc = Tableau::new(Layout::DoolittleC, kind, cols, vec![1]);
    for (k, e) in ex.iter().enumerate() {
        let mut cells = vec![Cell::Value(e.reciprocal.clone())];
        for j in 1..size {
            cells.push(if j > k { Cell::Value(e.coeffs[j].clone()) } else { Cell::Empty });
        }
        tc.push(TableauRow::new(cells));
    }
    tc
}

/// Back substitution through columns: `constants` heads each column, and
/// each found unknown contributes one row of products. Returns the unknowns
/// and the table (D or F).
fn column_back_sub(
    layout: Layout,
    names: &[String],
    ex: &[Explicit],
    constants: Vec<Scalar>,
    ar: &mut Arith,
) -> (ColumnVector, Tableau) {
    let size = names.len();
    let mut t = Tableau::new(layout, ar.kind(), names.to_vec(), vec![]);
    t.push(TableauRow::new(constants.iter().cloned().map(Cell::Value).collect()));
    let mut columns: Vec<Vec<Scalar>> = constants.into_iter().map(|c| vec![c]).collect();
    let mut x = vec![ar.zero(); size];
    for v in (0..size).rev() {
        x[v] = ar.sum(&columns[v]);
        let mut cells = vec![Cell::Empty; size];
        for k in 0..v {
            let p = ar.mul(&x[v], &ex[k].coeffs[v]);
            cells[k] = Cell::Value(p.clone());
            columns[k].push(p);
        }
        cells[v] = Cell::Sum(names[v].clone(), x[v].clone());
        t.push(TableauRow::new(cells));
    }
    (x, t)
}

/// Tables C and D from table A, and the solution.
pub fn doolittle_back(ta: &Tableau) -> Result<(Tableau, Tableau, ColumnVector)> {
    doolittle_back_with(ta, &mut Arith::new(ta.kind))
}

pub fn doolittle_back_with(ta: &Tableau, ar: &mut Arith) -> Result<(Tableau, Tableau, ColumnVector)> {
    let (names, ex, _) = read_table_a(ta)?;
    let tc = table_c(&names, &ex, ta.kind);
    let constants = ex.iter().map(|e| e.constant.clone()).collect();
    let (x, td) = column_back_sub(Layout::DoolittleD, &names, &ex, constants, ar);
    Ok((tc, td, x))
}

/// Doolittle's whole solution of `0 = N·x + n`.
pub fn doolittle_solve(n: &Matrix, absolute: &[Scalar]) -> Result<ColumnVector> {
    let mut ar = Arith::new(n.kind());
    let (ta, _) = doolittle_forward_with(n, absolute, &mut ar)?;
    Ok(doolittle_back_with(&ta, &mut ar)?.2)
}

/// One pass of refinement: the approximation, its residual `r = N·x̄ + n`
/// (exact, then rounded), and the correction `e` with `N·e + r = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementStep {
    pub approx: ColumnVector,
    pub residual: ColumnVector,
    pub correction: ColumnVector,
    /// Exact max-norm of the residual before rounding.
    pub residual_norm: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementReport {
    pub iterations: Vec<RefinementStep>,
    pub solution: ColumnVector,
    /// Set when a correction made the residual larger; `solution` is then
    /// the best iterate seen.
    pub diverged: bool,
    /// Tables E and F of each pass.
    pub tables: Vec<(Tableau, Tableau)>,
}

fn exact_normal_residual(n: &Matrix, absolute: &[Scalar], x: &[Rational]) -> Vec<Rational> {
    (0..n.rows())
        .map(|i| {
            let mut acc = absolute[i].to_rational();
            for (nij, xj) in n.row(i).iter().zip(x) {
                acc += nij.to_rational() * xj;
            }
            acc
        })
        .collect()
}

fn exact_scalars(x: &[Rational]) -> ColumnVector {
    x.iter().cloned().map(Scalar::Exact).collect()
}

/// Iterative refinement in Doolittle's tables E and F, working in `kind`.
/// Residuals are formed exactly and then rounded to `kind`; the loop ends
/// when the residual vanishes, stops shrinking, or after `max_iters` passes.
///
/// The corrected values `x₁ + e₁ + …` are kept as exact sums, as Doolittle
/// wrote `w = w₁ + w₂` without rounding back to three digits, so the
/// approximations and the solution come back as exact scalars.
pub fn doolittle_refine(
    n: &Matrix,
    absolute: &[Scalar],
    x1: &[Scalar],
    kind: ScalarKind,
    max_iters: usize,
) -> Result<RefinementReport> {
    check_normal(n, absolute)?;
    if x1.len() != n.rows() {
        return Err(Error::ShapeMismatch {
            op: "doolittle_refine",
            left: n.shape(),
            right: (x1.len(), 1),
        });
    }
    let nk = n.with_kind(kind);
    let abs_k: Vec<Scalar> = absolute.iter().map(|v| v.convert(kind)).collect();
    let mut ar = Arith::new(kind);
    let (ta, _) = doolittle_forward_with(&nk, &abs_k, &mut ar)?;
    let (names, ex, _) = read_table_a(&ta)?;
    let size = names.len();

    let mut x: Vec<Rational> = x1.iter().map(|v| v.convert(kind).to_rational()).collect();
    let mut best = x.clone();
    let mut best_norm: Option<Rational> = None;
    let mut iterations = Vec::new();
    let mut tables = Vec::new();
    let mut diverged = false;
    let mut pass = 0;
    loop {
        let r_exact = exact_normal_residual(&nk, &abs_k, &x);
        let norm = max_norm(&r_exact);
        if let Some(prev) = &best_norm {
            if &norm >= prev {
                diverged = &norm > prev;
                break;
            }
        }
        best = x.clone();
        best_norm = Some(norm.clone());
        if norm.is_zero() {
            iterations.push(RefinementStep {
                approx: exact_scalars(&x),
                residual: vec![ar.zero(); size],
                correction: vec![ar.zero(); size],
                residual_norm: norm,
            });
            break;
        }
        if pass == max_iters {
            break;
        }
        pass += 1;
        let r: Vec<Scalar> = r_exact.iter().map(|q| ar.store(q.clone())).collect();

        // Table E: the residuals carried through table B's last column.
        let cols = (1..=size).map(|i| format!("{i}.")).collect();
        let mut te = Tableau::new(Layout::DoolittleE, kind, cols, vec![]);
        te.push(TableauRow::new(r.iter().cloned().map(Cell::Value).collect()));
        let mut columns: Vec<Vec<Scalar>> = r.iter().map(|v| vec![v.clone()]).collect();
        let mut s = vec![ar.zero(); size];
        for k in 0..size {
            s[k] = ar.sum(&columns[k]);
            let mut cells = vec![Cell::Empty; size];
            cells[k] = Cell::Sum(format!("s{}", k + 1), s[k].clone());
            for j in k + 1..size {
                let p = ar.mul(&s[k], &ex[k].coeffs[j]);
                cells[j] = Cell::Value(p.clone());
                columns[j].push(p);
            }
            te.push(TableauRow::new(cells));
        }
        // Table F: table D again, for the corrections.
        let constants = (0..size).map(|k| ar.mul(&s[k], &ex[k].reciprocal)).collect();
        let (e, tf) = column_back_sub(Layout::DoolittleF, &names, &ex, constants, &mut ar);
        let next: Vec<Rational> = x.iter().zip(&e).map(|(xi, ei)| xi + ei.to_rational()).collect();
        iterations.push(RefinementStep {
            approx: exact_scalars(&x),
            residual: r,
            correction: e,
            residual_norm: norm,
        });
        tables.push((te, tf));
        x = next;
    }
    Ok(RefinementReport {
        iterations,
        solution: exact_scalars(&best),
        diverged,
        tables,
    })
}

/// Recomputes tables A and B from their own entries: every product row of B
/// from its multiplier and pivot row, every pivot row of A as a column sum,
/// and every explicit row from its pivot row.
pub fn replay_doolittle(ta: &Tableau, tb: &Tableau) -> Result<bool> {
    let mut ar = Arith::new(ta.kind);
    let col_a = |name: &str| ta.columns.iter().position(|c| c == name);
    let size = ta.columns.len() - 2;
    let minus_one = Scalar::from_int(-1, ta.kind);
    for row in &tb.rows {
        if row.sources.len() != 2 {
            continue;
        }
        let (Some(ex), Some(pv)) = (ta.by_step(row.sources[0]), ta.by_step(row.sources[1])) else {
            return Ok(false);
        };
        let first = row.cells.iter().position(|c| !c.is_empty()).unwrap_or(0);
        let Some(ca) = col_a(&tb.columns[first]) else { return Ok(false) };
        let Some(m) = ex.cells[ca].value() else { return Ok(false) };
        for (j, cell) in row.cells.iter().enumerate().skip(first) {
            let Some(ca) = col_a(&tb.columns[j]) else { return Ok(false) };
            let (Some(p), Some(v)) = (pv.cells[ca].value(), cell.value()) else {
                return Ok(false);
            };
            if &ar.mul(m, p) != v {
                return Ok(false);
            }
        }
    }
    for (idx, row) in ta.rows.iter().enumerate() {
        if idx % 2 == 0 {
            if row.sources.is_empty() {
                continue;
            }
            let block: Option<Vec<&TableauRow>> = row.sources.iter().map(|&s| tb.by_step(s)).collect();
            let Some(block) = block else { return Ok(false) };
            for (ca, cell) in row.cells.iter().enumerate() {
                let Some(v) = cell.value() else { continue };
                let Some(cb) = tb.columns.iter().position(|c| c == &ta.columns[ca]) else {
                    return Ok(false);
                };
                let parts: Vec<&Scalar> = block.iter().filter_map(|r| r.cells[cb].value()).collect();
                if &ar.sum(parts) != v {
                    return Ok(false);
                }
            }
        } else {
            let k = idx / 2;
            let pivot_row = &ta.rows[idx - 1];
            let (Some(pivot), Some(recip)) = (pivot_row.cells[k + 1].value(), row.cells[0].value()) else {
                return Ok(false);
            };
            if &ar.div(&minus_one, pivot)? != recip {
                return Ok(false);
            }
            for j in k + 2..=size + 1 {
                let (Some(p), Some(v)) = (pivot_row.cells[j].value(), row.cells[j].value()) else {
                    return Ok(false);
                };
                if &ar.mul(p, recip) != v {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;
    use crate::scalar::PrecisionSpec;

    #[test]
    fn one_by_one() {
        let n = Matrix::from_i64(&[&[4]]);
        let (ta, tb) = doolittle_forward(&n, &exact_vector(&[8])).unwrap();
        assert!(tb.rows.is_empty());
        assert_eq!(ta.rows.len(), 2);
        assert_eq!(ta.rows[0].values(), vec![&Scalar::exact(4, 1), &Scalar::exact(8, 1)]);
        assert_eq!(ta.rows[1].cells[0], Cell::Value(Scalar::exact(-1, 4)));
        assert_eq!(ta.rows[1].cells[1], Cell::Text("w =".into()));
        assert_eq!(ta.rows[1].cells[2], Cell::Value(Scalar::exact(-2, 1)));
        let (_, _, x) = doolittle_back(&ta).unwrap();
        assert_eq!(x, exact_vector(&[-2]));
    }

    #[test]
    fn step_numbers_follow_the_figure() {
        let n = Matrix::from_i64(&[&[4, 1, 0, 1], &[1, 5, 1, 0], &[0, 1, 6, 1], &[1, 0, 1, 7]]);
        let (ta, tb) = doolittle_forward(&n, &exact_vector(&[1, 2, 3, 4])).unwrap();
        let a_steps: Vec<_> = ta.rows.iter().filter_map(|r| r.step).collect();
        let b_steps: Vec<_> = tb.rows.iter().filter_map(|r| r.step).collect();
        assert_eq!(a_steps, vec![1, 2, 5, 6, 10, 11, 16, 17]);
        assert_eq!(b_steps, vec![3, 4, 7, 8, 9, 12, 13, 14, 15]);
        assert_eq!(ta.by_step(10).unwrap().sources, vec![7, 8, 9]);
        assert_eq!(tb.by_step(9).unwrap().sources, vec![6, 5]);
        ta.check_numbering().unwrap();
        assert!(replay_doolittle(&ta, &tb).unwrap());
    }

    #[test]
    fn refinement_from_exact_start_is_immediate() {
        let n = Matrix::from_i64(&[&[4]]);
        let r = doolittle_refine(&n, &exact_vector(&[8]), &exact_vector(&[-2]), ScalarKind::Exact, 3).unwrap();
        assert_eq!(r.iterations.len(), 1);
        assert!(r.iterations[0].correction.iter().all(Scalar::is_zero));
        assert!(!r.diverged);
    }

    #[test]
    fn not_positive_definite() {
        let n = Matrix::from_i64(&[&[1, 2], &[2, 1]]);
        assert_eq!(
            doolittle_forward(&n, &exact_vector(&[0, 0])).unwrap_err(),
            Error::NotPositiveDefinite { step: 2 }
        );
        let asym = Matrix::from_i64(&[&[1, 2], &[0, 1]]);
        assert_eq!(doolittle_forward(&asym, &exact_vector(&[0, 0])).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn three_digit_tables() {
        let kind = ScalarKind::Fixed(PrecisionSpec::significant(3).unwrap());
        let n = Matrix::from_i64(&[&[3, 1], &[1, 3]]).with_kind(kind);
        let abs: Vec<Scalar> = exact_vector(&[-1, -1]).iter().map(|v| v.convert(kind)).collect();
        let (ta, tb) = doolittle_forward(&n, &abs).unwrap();
        assert_eq!(ta.rows[1].cells[0].render(), "\u{2212}.333");
        assert!(replay_doolittle(&ta, &tb).unwrap());
    }
}
