//! Cholesky's method as Benoit laid it out: normal equations
//! `N·λ + K = 0` replaced by triangular condition equations `β·y + K = 0`,
//! then `βᵗ·λ = y` and `x = Aᵗ·λ`.

use crate::error::{Error, Result};
use crate::ldu::{back_sub_with, forward_sub_with, ldu_decompose};
use crate::leastsq::{build_normal, correlate_recover, LsqCase, LsqProblem};
use crate::matrix::{ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::Scalar;

use super::tableau::{Cell, Layout, Tableau, TableauRow};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CholeskyFactors {
    /// Lower triangular, positive diagonal.
    pub beta: Matrix,
    pub y: ColumnVector,
    pub lambda: ColumnVector,
    pub x: ColumnVector,
}

fn require_spd_shape(n: &Matrix) -> Result<()> {
    if !n.is_square() {
        return Err(Error::NotSquare {
            rows: n.rows(),
            cols: n.cols(),
        });
    }
    if !n.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// β column by column: `β_ii = √(a_ii − Σ β_ik²)` and
/// `β_ri = (a_ri − Σ β_rk·β_ik) / β_ii`, each a single machine operation.
/// Exact kind fails with [`Error::IrrationalRoot`] unless every radicand is
/// a perfect square; use [`cholesky_squared`] there.
pub fn cholesky_factor(n: &Matrix) -> Result<Matrix> {
    cholesky_factor_with(n, &mut Arith::new(n.kind()))
}

pub fn cholesky_factor_with(n: &Matrix, ar: &mut Arith) -> Result<Matrix> {
    require_spd_shape(n)?;
    let p = n.rows();
    let mut beta = Matrix::zeros(p, p, n.kind());
    for i in 0..p {
        let prior: Vec<Scalar> = beta.row(i)[..i].to_vec();
        let radicand = ar.dot_sub(n.get(i, i), prior.iter().map(|b| (b, b)));
        let diag = ar.sqrt(&radicand, i + 1)?;
        for r in i + 1..p {
            let row_r: Vec<Scalar> = beta.row(r)[..i].to_vec();
            let v = ar.dot_sub_div(n.get(r, i), row_r.iter().zip(&prior), &diag)?;
            beta.set(r, i, v);
        }
        beta.set(i, i, diag);
    }
    Ok(beta)
}

/// The squared form `N = L·D·Lᵗ` with unit lower `L` and positive diagonal
/// `D`, so that `β = L·D^{1/2}` without any square root.
pub fn cholesky_squared(n: &Matrix) -> Result<(Matrix, ColumnVector)> {
    require_spd_shape(n)?;
    let (f, _) = ldu_decompose(n, false).map_err(|e| match e {
        Error::Singular { step } => Error::NotPositiveDefinite { step },
        other => other,
    })?;
    let d = f.pivots();
    if let Some(step) = d.iter().position(|v| v.is_negative() || v.is_zero()) {
        return Err(Error::NotPositiveDefinite { step: step + 1 });
    }
    Ok((f.l, d))
}

/// Solves either least-squares case through the squared form. Case 1
/// solves the normal equations for `x`; case 2 solves them for `λ` and
/// returns `x = Aᵗλ`.
pub fn cholesky_squared_solve(p: &LsqProblem) -> Result<ColumnVector> {
    let (n, rhs) = build_normal(p)?;
    let (l, d) = cholesky_squared(&n)?;
    let mut ar = Arith::new(n.kind());
    let z = forward_sub_with(&l, &rhs, &mut ar)?;
    let w: Vec<Scalar> = z.iter().zip(&d).map(|(zi, di)| ar.div(zi, di)).collect::<Result<_>>()?;
    let u = back_sub_with(&l.transpose(), &w, &mut ar)?;
    match p.case {
        LsqCase::Case1 => Ok(u),
        LsqCase::Case2 => correlate_recover(p, &u),
    }
}

/// Cholesky's whole computation for a case-2 problem, with Benoit's table:
/// the normal coefficients above the diagonal, β below, `K` and `λ` on the
/// right and `y` along the bottom.
pub fn cholesky_solve(p: &LsqProblem) -> Result<(CholeskyFactors, Tableau)> {
    if p.case != LsqCase::Case2 {
        return Err(Error::InvalidArgument("Cholesky's method takes condition equations (case 2)".into()));
    }
    let (n, b) = build_normal(p)?;
    let mut ar = Arith::new(n.kind());
    let beta = cholesky_factor_with(&n, &mut ar)?;
    let y = forward_sub_with(&beta, &b, &mut ar)?;
    let lambda = back_sub_with(&beta.transpose(), &y, &mut ar)?;
    let x = correlate_recover(p, &lambda)?;
    let k: Vec<Scalar> = b.iter().map(|v| ar.neg(v)).collect();
    let tableau = benoit_tableau(&n, &beta, &k, &y, &lambda);
    Ok((CholeskyFactors { beta, y, lambda, x }, tableau))
}

fn benoit_tableau(n: &Matrix, beta: &Matrix, k: &[Scalar], y: &[Scalar], lambda: &[Scalar]) -> Tableau {
    let p = n.rows();
    let mut cols = vec![String::new()];
    cols.extend((1..=p).map(|i| format!("\u{3bb}{i}")));
    cols.push("K".into());
    cols.push("\u{3bb}".into());
    let mut t = Tableau::new(Layout::Benoit, n.kind(), cols, vec![p + 1, p + 3]);
    for i in 0..p {
        let mut cells: Vec<Cell> = beta.row(i)[..=i].iter().cloned().map(Cell::Value).collect();
        cells.extend(n.row(i)[i..].iter().cloned().map(Cell::Value));
        cells.push(Cell::Value(k[i].clone()));
        cells.push(Cell::Value(lambda[i].clone()));
        t.push(TableauRow::new(cells).label((i + 1).to_string()));
    }
    let mut cells: Vec<Cell> = y.iter().cloned().map(Cell::Value).collect();
    cells.resize(p + 3, Cell::Empty);
    t.push(TableauRow::new(cells).label("y"));
    t
}

/// Recomputes β, `y` and `λ` of a Benoit table from its own `a` and `K`
/// entries.
pub fn replay_benoit(t: &Tableau) -> Result<bool> {
    if t.layout != Layout::Benoit {
        return Err(Error::InvalidArgument(format!("expected a Benoit table, got {}", t.layout)));
    }
    let p = t.columns.len() - 3;
    if t.rows.len() != p + 1 {
        return Ok(false);
    }
    let cell = |i: usize, j: usize| -> Result<Scalar> {
        t.rows[i].cells[j]
            .value()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("Benoit table is missing row {} column {j}", i + 1)))
    };
    let mut n = Matrix::zeros(p, p, t.kind);
    for i in 0..p {
        for j in i..p {
            let v = cell(i, j + 1)?;
            n.set(i, j, v.clone());
            n.set(j, i, v);
        }
    }
    let b: Vec<Scalar> = (0..p).map(|i| cell(i, p + 1).map(|k| k.convert(t.kind))).collect::<Result<_>>()?;
    let mut ar = Arith::new(t.kind);
    let b: Vec<Scalar> = b.iter().map(|k| ar.neg(k)).collect();
    let beta = cholesky_factor_with(&n, &mut ar)?;
    let y = forward_sub_with(&beta, &b, &mut ar)?;
    let lambda = back_sub_with(&beta.transpose(), &y, &mut ar)?;
    let k: Vec<Scalar> = b.iter().map(|v| ar.neg(v)).collect();
    Ok(benoit_tableau(&n, &beta, &k, &y, &lambda).rows == t.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{exact_vector, mat_mul};
    use crate::scalar::{PrecisionSpec, ScalarKind};

    #[test]
    fn twice_identity() {
        let p = LsqProblem::new(LsqCase::Case2, Matrix::from_i64(&[&[2, 0], &[0, 2]]), exact_vector(&[4, 6])).unwrap();
        let (f, t) = cholesky_solve(&p).unwrap();
        assert_eq!(f.beta, Matrix::from_i64(&[&[2, 0], &[0, 2]]));
        assert_eq!(f.lambda, vec![Scalar::exact(1, 1), Scalar::exact(3, 2)]);
        assert_eq!(f.x, exact_vector(&[2, 3]));
        assert_eq!(t.rows[2].label.as_deref(), Some("y"));
        assert!(replay_benoit(&t).unwrap());
    }

    #[test]
    fn small_factor() {
        let beta = cholesky_factor(&Matrix::from_i64(&[&[4, 2], &[2, 2]])).unwrap();
        assert_eq!(beta, Matrix::from_i64(&[&[2, 0], &[1, 1]]));
    }

    #[test]
    fn identity_normal_matrix() {
        let p = LsqProblem::new(LsqCase::Case2, Matrix::from_i64(&[&[1, 0], &[0, 1]]), exact_vector(&[5, -7])).unwrap();
        let (f, _) = cholesky_solve(&p).unwrap();
        assert_eq!(f.y, exact_vector(&[5, -7]));
        assert_eq!(f.lambda, f.y);
    }

    #[test]
    fn irrational_roots_in_exact_mode() {
        let n = Matrix::from_i64(&[&[2, 1], &[1, 2]]);
        assert_eq!(cholesky_factor(&n), Err(Error::IrrationalRoot { step: 1 }));
        let (l, d) = cholesky_squared(&n).unwrap();
        let ld = mat_mul(&l, &Matrix::diagonal(&d, n.kind()).unwrap()).unwrap();
        assert_eq!(mat_mul(&ld, &l.transpose()).unwrap(), n);
    }

    #[test]
    fn fixed_beta_reconstructs_within_an_ulp() {
        let kind = ScalarKind::Fixed(PrecisionSpec::fractional(6).unwrap());
        let n = Matrix::from_i64(&[&[2, 1], &[1, 2]]).with_kind(kind);
        let beta = cholesky_factor(&n).unwrap();
        let bbt = mat_mul(&beta.with_kind(ScalarKind::Exact), &beta.transpose().with_kind(ScalarKind::Exact)).unwrap();
        for (u, v) in bbt.entries().iter().zip(n.entries()) {
            let diff = (u.to_rational() - v.to_rational()) * crate::scalar::int(100_000);
            assert!(diff < crate::scalar::int(1) && diff > crate::scalar::int(-1));
        }
    }

    #[test]
    fn not_positive_definite() {
        let n = Matrix::from_i64(&[&[1, 2], &[2, 1]]);
        assert_eq!(cholesky_squared(&n).unwrap_err(), Error::NotPositiveDefinite { step: 2 });
    }
}
