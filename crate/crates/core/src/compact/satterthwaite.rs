//! Satterthwaite's triple factorization `A = (R₁ + I)·S₁·(I + T₁)` with
//! strictly triangular `R₁`, `T₁` and diagonal `S₁`, and his improvement of
//! an approximate inverse.

use crate::error::{Error, Result};
use crate::ldu::{ldu_decompose, ldu_decompose_with, Factorization};
use crate::matrix::{mat_mul, mat_mul_with, Matrix};
use crate::ops::Arith;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleFactorization {
    pub r1: Matrix,
    pub s1: Matrix,
    pub t1: Matrix,
}

impl TripleFactorization {
    /// `(R₁ + I)·S₁·(I + T₁)`, exactly.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let n = self.s1.rows();
        let id = Matrix::identity(n, self.s1.kind());
        let plus = |m: &Matrix| -> Matrix {
            let mut out = m.clone();
            for i in 0..n {
                out.set(i, i, Scalar::from_rational(m.get(i, i).to_rational() + id.get(i, i).to_rational(), m.kind()));
            }
            out
        };
        mat_mul(&mat_mul(&plus(&self.r1), &self.s1)?, &plus(&self.t1))
    }

    fn as_ldu(&self) -> Factorization {
        let n = self.s1.rows();
        let kind = self.s1.kind();
        let mut l = self.r1.clone();
        let mut u = self.t1.clone();
        for i in 0..n {
            l.set(i, i, Scalar::one(kind));
            u.set(i, i, Scalar::one(kind));
        }
        Factorization {
            perm: (0..n).collect(),
            l,
            d: self.s1.clone(),
            u,
        }
    }

    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        self.as_ldu().solve(b)
    }
}

/// Splits the unpivoted LDU factorization into Satterthwaite's three
/// factors.
pub fn satterthwaite_factor(a: &Matrix) -> Result<TripleFactorization> {
    let (f, _) = ldu_decompose(a, false)?;
    let n = a.rows();
    let mut r1 = f.l.clone();
    let mut t1 = f.u.clone();
    for i in 0..n {
        r1.set(i, i, Scalar::zero(a.kind()));
        t1.set(i, i, Scalar::zero(a.kind()));
    }
    let s1 = Matrix::diagonal(&f.pivots(), a.kind())?;
    Ok(TripleFactorization { r1, s1, t1 })
}

/// The inverse by factoring and solving against each unit column.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve_columns(a, &Matrix::identity(a.rows(), a.kind()), &mut Arith::new(a.kind()))
}

/// `A⁻¹·B`, one column at a time, through a pivoted factorization.
fn solve_columns(a: &Matrix, b: &Matrix, ar: &mut Arith) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let (f, _) = ldu_decompose_with(a, true, ar)?;
    let mut out = Matrix::zeros(a.rows(), b.cols(), a.kind());
    for j in 0..b.cols() {
        let x = f.solve_with(&b.column(j), ar)?;
        for (i, v) in x.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Given `F ≈ A⁻¹`, returns `(F·A)⁻¹·F`, factoring `F·A` for the inner
/// inverse. All arithmetic is in the kind of `A`.
pub fn improve_inverse(a: &Matrix, f: &Matrix) -> Result<Matrix> {
    let mut ar = Arith::new(a.kind());
    let f = f.with_kind(a.kind());
    let fa = mat_mul_with(&f, a, &mut ar)?;
    solve_columns(&fa, &f, &mut ar)
}
