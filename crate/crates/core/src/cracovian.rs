//! Banachiewicz's cracovians: arrays multiplied column by column.
//!
//! The product `A∧B` dots column `i` of `A` with column `j` of `B`, which is
//! the ordinary `AᵗB`. It is not associative.

use crate::error::{Error, Result};
use crate::matrix::{mat_mul_with, Matrix};
use crate::ops::Arith;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cracovian(pub Matrix);

impl Cracovian {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl From<Matrix> for Cracovian {
    fn from(m: Matrix) -> Self {
        Cracovian(m)
    }
}

/// `C[i][j] = Σ_k A[k][i]·B[k][j]`, one rounding per entry.
pub fn cracovian_product(a: &Cracovian, b: &Cracovian) -> Result<Cracovian> {
    let (a, b) = (&a.0, &b.0);
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            op: "cracovian product",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut ar = Arith::new(a.kind());
    let mut c = Matrix::zeros(a.cols(), b.cols(), a.kind());
    for i in 0..a.cols() {
        let col_i = a.column(i);
        for j in 0..b.cols() {
            let col_j = b.column(j);
            c.set(i, j, ar.dot(&ar.zero(), col_i.iter().zip(&col_j)));
        }
    }
    Ok(Cracovian(c))
}

/// The same product through ordinary matrix multiplication, for checking.
pub fn via_transpose(a: &Cracovian, b: &Cracovian) -> Result<Cracovian> {
    let mut ar = Arith::new(a.0.kind());
    Ok(Cracovian(mat_mul_with(&a.0.transpose(), &b.0, &mut ar)?))
}

/// `(A, B, C)` with `(A∧B)∧C ≠ A∧(B∧C)`: a nilpotent `A` against identities,
/// since the left grouping gives `A` and the right gives `Aᵗ`.
pub fn non_associative_witness() -> (Cracovian, Cracovian, Cracovian) {
    let a = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
    let id = Matrix::from_i64(&[&[1, 0], &[0, 1]]);
    (Cracovian(a), Cracovian(id.clone()), Cracovian(id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarKind;

    #[test]
    fn identity_squared() {
        let id = Cracovian(Matrix::identity(3, ScalarKind::Exact));
        assert_eq!(cracovian_product(&id, &id).unwrap(), id);
    }

    #[test]
    fn witness_is_not_associative() {
        let (a, b, c) = non_associative_witness();
        let left = cracovian_product(&cracovian_product(&a, &b).unwrap(), &c).unwrap();
        let right = cracovian_product(&a, &cracovian_product(&b, &c).unwrap()).unwrap();
        assert_ne!(left, right);
        assert_eq!(left.0, a.0);
        assert_eq!(right.0, a.0.transpose());
    }

    #[test]
    fn rectangular_and_mismatch() {
        let a = Cracovian(Matrix::from_i64(&[&[1, 2], &[3, 4], &[5, 6]]));
        let b = Cracovian(Matrix::from_i64(&[&[1], &[0], &[1]]));
        assert_eq!(cracovian_product(&a, &b).unwrap().0, Matrix::from_i64(&[&[6], &[8]]));
        assert_eq!(cracovian_product(&a, &b).unwrap(), via_transpose(&a, &b).unwrap());
        let short = Cracovian(Matrix::from_i64(&[&[1]]));
        assert!(matches!(cracovian_product(&a, &short), Err(Error::ShapeMismatch { .. })));
    }
}
