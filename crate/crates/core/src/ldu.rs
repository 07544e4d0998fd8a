//! Elementary row operations, the LDU decomposition of von Neumann and
//! Goldstine, and triangular substitution.

use crate::error::{Error, Result};
use crate::matrix::{check_kinds, ColumnVector, Matrix};
use crate::ops::{Arith, OpCounter};
use crate::scalar::{Scalar, ScalarKind};

/// One row operation. Row and column indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryStep {
    /// `row[target] ← row[target] − multiplier · row[source]`. The entry in
    /// `column` is the one being annihilated: it is set to zero outright and
    /// only entries to its right are recomputed, as a hand computer would.
    SubtractMultiple {
        target: usize,
        source: usize,
        multiplier: Scalar,
        column: usize,
    },
    Swap { a: usize, b: usize },
    /// `row[row] ← factor · row[row]`.
    Scale { row: usize, factor: Scalar },
}

impl ElementaryStep {
    pub fn validate(&self, rows: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidStep(msg));
        match self {
            Self::SubtractMultiple { target, source, .. } => {
                if target == source {
                    return bad(format!("row {target} combined with itself"));
                }
                if *target >= rows || *source >= rows {
                    return bad(format!("row index out of range for {rows} rows"));
                }
            }
            Self::Swap { a, b } => {
                if *a >= rows || *b >= rows {
                    return bad(format!("row index out of range for {rows} rows"));
                }
            }
            Self::Scale { row, factor } => {
                if *row >= rows {
                    return bad(format!("row index out of range for {rows} rows"));
                }
                if factor.is_zero() {
                    return bad("scaling by zero".into());
                }
            }
        }
        Ok(())
    }

    /// Applies the step in place, rounding each recomputed entry once.
    pub fn apply(&self, m: &mut Matrix, ar: &mut Arith) -> Result<()> {
        self.validate(m.rows())?;
        match self {
            Self::SubtractMultiple {
                target,
                source,
                multiplier,
                column,
            } => {
                for j in column + 1..m.cols() {
                    let v = ar.dot_sub(m.get(*target, j), [(multiplier, m.get(*source, j))]);
                    m.set(*target, j, v);
                }
                m.set(*target, *column, ar.zero());
            }
            Self::Swap { a, b } => m.swap_rows(*a, *b),
            Self::Scale { row, factor } => {
                for j in 0..m.cols() {
                    let v = ar.mul(factor, m.get(*row, j));
                    m.set(*row, j, v);
                }
            }
        }
        Ok(())
    }
}

/// A named snapshot of the working matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub label: String,
    pub matrix: Matrix,
}

/// Record of an elimination: the starting matrix, every step taken, the full
/// matrix after each stage and the operations spent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLog {
    pub initial: Matrix,
    pub steps: Vec<ElementaryStep>,
    pub stages: Vec<Stage>,
    pub counter: OpCounter,
}

impl TraceLog {
    pub fn new(initial: Matrix) -> Self {
        Self {
            stages: vec![Stage {
                label: "initial".into(),
                matrix: initial.clone(),
            }],
            initial,
            steps: Vec::new(),
            counter: OpCounter::default(),
        }
    }

    pub fn push_stage(&mut self, label: impl Into<String>, matrix: &Matrix) {
        self.stages.push(Stage {
            label: label.into(),
            matrix: matrix.clone(),
        });
    }

    pub fn final_matrix(&self) -> &Matrix {
        &self.stages.last().expect("trace has an initial stage").matrix
    }

    /// Re-applies every step to the initial matrix.
    pub fn replay(&self) -> Result<Matrix> {
        let mut m = self.initial.clone();
        let mut ar = Arith::new(m.kind());
        for step in &self.steps {
            step.apply(&mut m, &mut ar)?;
        }
        Ok(m)
    }

    pub fn replays(&self) -> bool {
        self.replay().map_or(false, |m| &m == self.final_matrix())
    }
}

/// `P·A = L·D·U` with unit triangular `L`, `U`. `perm[i]` is the row of `A`
/// that ends up in position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub perm: Vec<usize>,
    pub l: Matrix,
    pub d: Matrix,
    pub u: Matrix,
}

impl Factorization {
    pub fn permuted(&self, a: &Matrix) -> Matrix {
        let rows: Vec<Vec<Scalar>> = self.perm.iter().map(|&r| a.row(r).to_vec()).collect();
        Matrix::from_rows(rows).expect("permutation of a valid matrix")
    }

    /// `D·U`, the upper factor of the schoolbook elimination.
    pub fn upper(&self) -> Matrix {
        let n = self.u.rows();
        let mut m = Matrix::zeros(n, n, self.u.kind());
        let mut ar = Arith::new(self.u.kind());
        for i in 0..n {
            for j in i..n {
                m.set(i, j, ar.mul(self.d.get(i, i), self.u.get(i, j)));
            }
        }
        m
    }

    /// `L·D`, Crout's lower factor.
    pub fn lower_scaled(&self) -> Matrix {
        let n = self.l.rows();
        let mut m = Matrix::zeros(n, n, self.l.kind());
        let mut ar = Arith::new(self.l.kind());
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, ar.mul(self.l.get(i, j), self.d.get(j, j)));
            }
        }
        m
    }

    pub fn pivots(&self) -> ColumnVector {
        (0..self.d.rows()).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Solves `A·x = b` using the stored factors.
    pub fn solve_with(&self, b: &[Scalar], ar: &mut Arith) -> Result<ColumnVector> {
        let pb: Vec<Scalar> = self.perm.iter().map(|&r| b[r].clone()).collect();
        let y = forward_sub_with(&self.l, &pb, ar)?;
        let z = y
            .iter()
            .enumerate()
            .map(|(i, yi)| ar.div(yi, self.d.get(i, i)))
            .collect::<Result<Vec<_>>>()?;
        back_sub_with(&self.u, &z, ar)
    }

    pub fn solve(&self, b: &[Scalar]) -> Result<ColumnVector> {
        self.solve_with(b, &mut Arith::new(self.l.kind()))
    }
}

fn require_square(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Index of the largest-magnitude entry of column `col` at or below `from`;
/// ties go to the lowest row.
pub(crate) fn pivot_row(m: &Matrix, col: usize, from: usize) -> usize {
    let mut best = from;
    let mut best_abs = m.get(from, col).abs_rational();
    for r in from + 1..m.rows() {
        let v = m.get(r, col).abs_rational();
        if v > best_abs {
            best = r;
            best_abs = v;
        }
    }
    best
}

/// Factors `A` into `P·A = L·D·U`. The trace holds the full reduced matrix
/// `A^(i)` after each stage.
pub fn ldu_decompose(a: &Matrix, pivoting: bool) -> Result<(Factorization, TraceLog)> {
    let mut ar = Arith::new(a.kind());
    ldu_decompose_with(a, pivoting, &mut ar)
}

pub fn ldu_decompose_with(a: &Matrix, pivoting: bool, ar: &mut Arith) -> Result<(Factorization, TraceLog)> {
    require_square(a)?;
    let n = a.rows();
    let kind = a.kind();
    let start = ar.counter();
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = Matrix::identity(n, kind);
    let mut d = Matrix::zeros(n, n, kind);
    let mut u = Matrix::identity(n, kind);
    let mut log = TraceLog::new(a.clone());

    for i in 0..n {
        if pivoting {
            let p = pivot_row(&work, i, i);
            if p != i {
                work.swap_rows(i, p);
                perm.swap(i, p);
                // Multipliers already found travel with their rows.
                for k in 0..i {
                    let (x, y) = (l.get(i, k).clone(), l.get(p, k).clone());
                    l.set(i, k, y);
                    l.set(p, k, x);
                }
                log.steps.push(ElementaryStep::Swap { a: i, b: p });
            }
        }
        let pivot = work.get(i, i).clone();
        if ar.is_negligible(&pivot) {
            return Err(Error::Singular { step: i + 1 });
        }
        d.set(i, i, pivot.clone());
        for k in i + 1..n {
            if !work.get(i, k).is_zero() {
                let v = ar.div(work.get(i, k), &pivot)?;
                u.set(i, k, v);
            }
        }
        let mut changed = false;
        for j in i + 1..n {
            if work.get(j, i).is_zero() {
                continue;
            }
            let m = ar.div(work.get(j, i), &pivot)?;
            l.set(j, i, m.clone());
            let step = ElementaryStep::SubtractMultiple {
                target: j,
                source: i,
                multiplier: m,
                column: i,
            };
            step.apply(&mut work, ar)?;
            log.steps.push(step);
            changed = true;
        }
        if changed {
            log.push_stage(format!("A({})", i + 2), &work);
        }
    }
    let mut counter = ar.counter();
    counter.adds -= start.adds;
    counter.subs -= start.subs;
    counter.muls -= start.muls;
    counter.divs -= start.divs;
    counter.sqrts -= start.sqrts;
    counter.roundings -= start.roundings;
    log.counter = counter;
    Ok((Factorization { perm, l, d, u }, log))
}

/// Solves `L·x = b` for lower-triangular `L`; unit diagonals cost no division.
pub fn forward_sub(l: &Matrix, b: &[Scalar]) -> Result<ColumnVector> {
    forward_sub_with(l, b, &mut Arith::new(l.kind()))
}

pub fn forward_sub_with(l: &Matrix, b: &[Scalar], ar: &mut Arith) -> Result<ColumnVector> {
    triangular(l, b, ar, false)
}

/// Solves `U·x = b` for upper-triangular `U`.
pub fn back_sub(u: &Matrix, b: &[Scalar]) -> Result<ColumnVector> {
    back_sub_with(u, b, &mut Arith::new(u.kind()))
}

pub fn back_sub_with(u: &Matrix, b: &[Scalar], ar: &mut Arith) -> Result<ColumnVector> {
    triangular(u, b, ar, true)
}

fn triangular(t: &Matrix, b: &[Scalar], ar: &mut Arith, upper: bool) -> Result<ColumnVector> {
    require_square(t)?;
    let n = t.rows();
    if b.len() != n {
        return Err(Error::ShapeMismatch {
            op: if upper { "back_sub" } else { "forward_sub" },
            left: t.shape(),
            right: (b.len(), 1),
        });
    }
    check_kinds(t.kind(), b)?;
    let mut x = vec![ar.zero(); n];
    let order: Vec<usize> = if upper { (0..n).rev().collect() } else { (0..n).collect() };
    for &i in &order {
        let diag = t.get(i, i);
        if ar.is_negligible(diag) {
            return Err(Error::ZeroDiagonal { row: i + 1 });
        }
        let known: Vec<usize> = if upper { (i + 1..n).collect() } else { (0..i).collect() };
        let pairs = known
            .iter()
            .filter(|&&k| !t.get(i, k).is_zero())
            .map(|&k| (t.get(i, k), &x[k]))
            .collect::<Vec<_>>();
        let v = if diag.is_one() {
            ar.dot_sub(&b[i], pairs)
        } else {
            ar.dot_sub_div(&b[i], pairs, diag)?
        };
        x[i] = v;
    }
    Ok(x)
}

/// Multiplies out the inverses of a swap-free step list, giving the unit
/// lower factor `L` that the steps imply.
pub fn steps_to_factor(steps: &[ElementaryStep], n: usize) -> Result<Matrix> {
    let mut m = Matrix::identity(n, ScalarKind::Exact);
    for step in steps {
        step.validate(n)?;
        match step {
            ElementaryStep::Swap { .. } => return Err(Error::SwapInSteps),
            // M·E⁻¹ with E = I − c·e_t·e_sᵗ adds c × column t to column s.
            ElementaryStep::SubtractMultiple {
                target,
                source,
                multiplier,
                ..
            } => {
                let c = multiplier.to_rational();
                for r in 0..n {
                    let v = m.get(r, *source).to_rational() + &c * m.get(r, *target).to_rational();
                    m.set(r, *source, Scalar::Exact(v));
                }
            }
            ElementaryStep::Scale { row, factor } => {
                let c = factor.to_rational();
                for r in 0..n {
                    let v = m.get(r, *row).to_rational() / &c;
                    m.set(r, *row, Scalar::Exact(v));
                }
            }
        }
    }
    Ok(m)
}

/// `L·D·U` multiplied out exactly.
pub fn reconstruct(f: &Factorization) -> Result<Matrix> {
    let exact = |m: &Matrix| m.with_kind(ScalarKind::Exact);
    let ld = crate::matrix::mat_mul(&exact(&f.l), &exact(&f.d))?;
    crate::matrix::mat_mul(&ld, &exact(&f.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;

    fn eq1() -> Matrix {
        Matrix::from_i64(&[&[1, 2, 1], &[1, 1, 2], &[2, 1, 1]])
    }

    #[test]
    fn classic_factor_pair() {
        let (f, log) = ldu_decompose(&eq1(), false).unwrap();
        assert_eq!(f.l, Matrix::from_i64(&[&[1, 0, 0], &[1, 1, 0], &[2, 3, 1]]));
        assert_eq!(f.upper(), Matrix::from_i64(&[&[1, 2, 1], &[0, -1, 1], &[0, 0, -4]]));
        assert_eq!(reconstruct(&f).unwrap(), eq1());
        assert_eq!(steps_to_factor(&log.steps, 3).unwrap(), f.l);
        assert!(log.replays());
        assert_eq!(f.solve(&exact_vector(&[3, 9, 16])).unwrap(), exact_vector(&[9, -4, 2]));
    }

    #[test]
    fn identity_has_empty_trace() {
        let (f, log) = ldu_decompose(&Matrix::identity(4, ScalarKind::Exact), false).unwrap();
        assert!(log.steps.is_empty());
        assert_eq!(f.d, Matrix::identity(4, ScalarKind::Exact));
        assert_eq!(steps_to_factor(&[], 3).unwrap(), Matrix::identity(3, ScalarKind::Exact));
    }

    #[test]
    fn singular_names_step() {
        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(ldu_decompose(&a, true), Err(Error::Singular { step: 2 }));
        let b = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(ldu_decompose(&b, false), Err(Error::Singular { step: 1 }));
        let (f, _) = ldu_decompose(&b, true).unwrap();
        assert_eq!(f.perm, vec![1, 0]);
    }

    #[test]
    fn pivoting_ties_go_to_lowest_row() {
        let a = Matrix::from_i64(&[&[1, 1, 0], &[-3, 1, 1], &[3, 0, 1]]);
        let (f, log) = ldu_decompose(&a, true).unwrap();
        assert_eq!(f.perm[0], 1);
        assert_eq!(log.steps[0], ElementaryStep::Swap { a: 0, b: 1 });
        assert_eq!(reconstruct(&f).unwrap(), f.permuted(&a));
    }

    #[test]
    fn substitutions() {
        let u = Matrix::from_i64(&[&[1, 2, 1], &[0, -1, 1], &[0, 0, -4]]);
        assert_eq!(back_sub(&u, &exact_vector(&[3, 6, -8])).unwrap(), exact_vector(&[9, -4, 2]));
        let i = Matrix::identity(3, ScalarKind::Exact);
        assert_eq!(forward_sub(&i, &exact_vector(&[1, 2, 3])).unwrap(), exact_vector(&[1, 2, 3]));
        let z = Matrix::from_i64(&[&[1, 0], &[1, 0]]);
        assert_eq!(forward_sub(&z, &exact_vector(&[1, 1])), Err(Error::ZeroDiagonal { row: 2 }));
    }

    #[test]
    fn swaps_are_refused() {
        assert_eq!(steps_to_factor(&[ElementaryStep::Swap { a: 0, b: 1 }], 2), Err(Error::SwapInSteps));
        let bad = ElementaryStep::SubtractMultiple {
            target: 1,
            source: 1,
            multiplier: Scalar::exact(1, 1),
            column: 0,
        };
        assert!(matches!(bad.validate(2), Err(Error::InvalidStep(_))));
    }
}
