//! Dense row-major matrices of [`Scalar`]s with one uniform kind.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::ops::Arith;
use crate::scalar::{Rational, Scalar, ScalarKind};

pub type ColumnVector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    kind: ScalarKind,
    data: Vec<Scalar>,
}

pub(crate) fn check_kinds<'a>(kind: ScalarKind, values: impl IntoIterator<Item = &'a Scalar>) -> Result<()> {
    for v in values {
        if v.kind() != kind {
            return Err(Error::MixedKinds {
                left: kind.to_string(),
                right: v.kind().to_string(),
            });
        }
    }
    Ok(())
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::InvalidArgument(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let kind = data[0].kind();
        check_kinds(kind, &data)?;
        Ok(Self { rows, cols, kind, data })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Exact integer matrix from nested rows; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v, ScalarKind::Exact)).collect())
                .collect(),
        )
        .expect("well-formed integer matrix")
    }

    pub fn from_rationals(rows: usize, cols: usize, values: Vec<Rational>, kind: ScalarKind) -> Result<Self> {
        Self::new(rows, cols, values.into_iter().map(|q| Scalar::from_rational(q, kind)).collect())
    }

    pub fn zeros(rows: usize, cols: usize, kind: ScalarKind) -> Self {
        Self {
            rows,
            cols,
            kind,
            data: vec![Scalar::zero(kind); rows * cols],
        }
    }

    pub fn identity(n: usize, kind: ScalarKind) -> Self {
        let mut m = Self::zeros(n, n, kind);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one(kind);
        }
        m
    }

    pub fn diagonal(values: &[Scalar], kind: ScalarKind) -> Result<Self> {
        check_kinds(kind, values)?;
        let n = values.len();
        let mut m = Self::zeros(n, n, kind);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    /// Stores `value`, converting it to this matrix's kind.
    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        let value = if value.kind() == self.kind { value } else { value.convert(self.kind) };
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ColumnVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Lower-right block starting at `(start, start)`.
    pub fn trailing(&self, start: usize) -> Matrix {
        self.block(start, start, self.rows - start, self.cols - start)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            for j in c0..c0 + cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows,
            cols,
            kind: self.kind,
            data,
        }
    }

    /// Appends `b` as an extra column.
    pub fn augment(&self, b: &[Scalar]) -> Result<Matrix> {
        if b.len() != self.rows {
            return Err(Error::ShapeMismatch {
                op: "augment",
                left: self.shape(),
                right: (b.len(), 1),
            });
        }
        check_kinds(self.kind, b)?;
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(b[i].clone());
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols + 1,
            kind: self.kind,
            data,
        })
    }

    /// Splits off the last column.
    pub fn split_last_column(&self) -> (Matrix, ColumnVector) {
        (self.block(0, 0, self.rows, self.cols - 1), self.column(self.cols - 1))
    }

    /// Re-expresses every entry under `kind`.
    pub fn with_kind(&self, kind: ScalarKind) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            kind,
            data: self.data.iter().map(|v| v.convert(kind)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            kind: self.kind,
            data,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.data.iter().map(Scalar::to_rational).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(Scalar::abs_rational)
            .max()
            .unwrap_or_default()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        self.get(i, j)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Scalar::render_table).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn same_kind(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.kind != b.kind {
        return Err(Error::MixedKinds {
            left: a.kind.to_string(),
            right: b.kind.to_string(),
        });
    }
    Ok(())
}

/// Matrix product; fixed kinds accumulate each entry and round it once.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    mat_mul_with(a, b, &mut Arith::new(a.kind))
}

pub fn mat_mul_with(a: &Matrix, b: &Matrix, ar: &mut Arith) -> Result<Matrix> {
    same_kind(a, b)?;
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch {
            op: "mat_mul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let zero = ar.zero();
    let mut data = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            data.push(ar.dot(&zero, (0..a.cols).map(|k| (a.get(i, k), b.get(k, j)))));
        }
    }
    Ok(Matrix {
        rows: a.rows,
        cols: b.cols,
        kind: a.kind,
        data,
    })
}

pub fn transpose(a: &Matrix) -> Matrix {
    a.transpose()
}

pub fn mat_vec(a: &Matrix, x: &[Scalar]) -> Result<ColumnVector> {
    if x.len() != a.cols {
        return Err(Error::ShapeMismatch {
            op: "mat_vec",
            left: a.shape(),
            right: (x.len(), 1),
        });
    }
    check_kinds(a.kind, x)?;
    let mut ar = Arith::new(a.kind);
    let zero = ar.zero();
    Ok((0..a.rows)
        .map(|i| ar.dot(&zero, a.row(i).iter().zip(x)))
        .collect())
}

/// `A·x − b`, each entry accumulated from `−b_i` and rounded once.
pub fn residual(a: &Matrix, x: &[Scalar], b: &[Scalar]) -> Result<ColumnVector> {
    if x.len() != a.cols || b.len() != a.rows {
        return Err(Error::ShapeMismatch {
            op: "residual",
            left: a.shape(),
            right: (x.len(), b.len()),
        });
    }
    check_kinds(a.kind, x.iter().chain(b))?;
    let mut ar = Arith::new(a.kind);
    Ok((0..a.rows)
        .map(|i| {
            let seed = ar.neg(&b[i]);
            ar.dot(&seed, a.row(i).iter().zip(x))
        })
        .collect())
}

/// Exact `A·x − b` regardless of the kind of the inputs.
pub fn exact_residual(a: &Matrix, x: &[Scalar], b: &[Scalar]) -> Vec<Rational> {
    (0..a.rows)
        .map(|i| {
            let mut acc = -b[i].to_rational();
            for (aij, xj) in a.row(i).iter().zip(x) {
                acc += aij.to_rational() * xj.to_rational();
            }
            acc
        })
        .collect()
}

/// Maximum absolute value of a vector of rationals.
pub fn max_norm(v: &[Rational]) -> Rational {
    v.iter().map(|q| num_traits::Signed::abs(q)).max().unwrap_or_default()
}

pub fn exact_vector(values: &[i64]) -> ColumnVector {
    values.iter().map(|&v| Scalar::from_int(v, ScalarKind::Exact)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrecisionSpec;

    #[test]
    fn identity_residual_is_zero() {
        let a = Matrix::identity(3, ScalarKind::Exact);
        let x = exact_vector(&[4, -2, 7]);
        assert!(residual(&a, &x, &x).unwrap().iter().all(Scalar::is_zero));
    }

    #[test]
    fn schoolbook_solution_has_zero_residual() {
        let a = Matrix::from_i64(&[&[1, 2, 1], &[1, 1, 2], &[2, 1, 1]]);
        let r = residual(&a, &exact_vector(&[9, -4, 2]), &exact_vector(&[3, 9, 16])).unwrap();
        assert!(r.iter().all(Scalar::is_zero));
    }

    #[test]
    fn shapes_and_kinds_are_checked() {
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(&[&[1, 2, 3]]);
        assert!(matches!(mat_mul(&a, &b), Err(Error::ShapeMismatch { .. })));
        let f = a.with_kind(ScalarKind::Fixed(PrecisionSpec::fractional(2).unwrap()));
        assert!(matches!(mat_mul(&a, &f), Err(Error::MixedKinds { .. })));
        assert!(Matrix::from_rows(vec![vec![Scalar::exact(1, 1)], vec![]]).is_err());
    }

    #[test]
    fn fixed_product_rounds_once_per_entry() {
        let kind = ScalarKind::Fixed(PrecisionSpec::fractional(1).unwrap());
        let a = Matrix::from_rationals(1, 2, vec![crate::scalar::ratio(3, 10), crate::scalar::ratio(3, 10)], kind).unwrap();
        let b = a.transpose();
        let mut ar = Arith::new(kind);
        // .09 + .09 = .18 -> .2 ; rounding each product first would give .2 as well
        // but with two roundings.
        let p = mat_mul_with(&a, &b, &mut ar).unwrap();
        assert_eq!(p[(0, 0)].render_table(), ".2");
        assert_eq!(ar.counter().roundings, 1);
    }

    #[test]
    fn transpose_involution() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().shape(), (3, 2));
    }
}
