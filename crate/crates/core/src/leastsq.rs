//! Gauss's least-squares machinery: normal equations, bracket auxiliaries
//! `[xy,k]` and their reduction, and correlate recovery.
//!
//! Observation equations are written the old way, `a·p + b·q + … + n = w`,
//! so the constant column is `n = −b` for the public form `A·x = b` and
//! `[nn,μ]` is the minimum sum of squared residuals.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{mat_mul, ColumnVector, Matrix};
use crate::ops::Arith;
use crate::scalar::{Rational, Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsqCase {
    /// Overdetermined: minimize ‖b − A·x‖.
    Case1,
    /// Underdetermined: minimize ‖x‖ subject to A·x = b.
    Case2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsqProblem {
    pub case: LsqCase,
    pub a: Matrix,
    pub b: ColumnVector,
}

impl LsqProblem {
    pub fn new(case: LsqCase, a: Matrix, b: ColumnVector) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::ShapeMismatch {
                op: "lsq",
                left: a.shape(),
                right: (b.len(), 1),
            });
        }
        crate::matrix::check_kinds(a.kind(), &b)?;
        let ok = match case {
            LsqCase::Case1 => a.rows() >= a.cols(),
            LsqCase::Case2 => a.rows() <= a.cols(),
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "{}x{} matrix does not fit {case:?}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(Self { case, a, b })
    }
}

/// Coefficient matrix and right-hand side of the normal equations:
/// `AᵗA·x = Aᵗb` (case 1) or `AAᵗ·u = b` (case 2).
pub fn build_normal(p: &LsqProblem) -> Result<(Matrix, ColumnVector)> {
    let at = p.a.transpose();
    match p.case {
        LsqCase::Case1 => {
            let n = mat_mul(&at, &p.a)?;
            let c = crate::matrix::mat_vec(&at, &p.b)?;
            Ok((n, c))
        }
        LsqCase::Case2 => Ok((mat_mul(&p.a, &at)?, p.b.clone())),
    }
}

/// The correlate equations `x = Aᵗu`.
pub fn correlate_recover(p: &LsqProblem, u: &[Scalar]) -> Result<ColumnVector> {
    crate::matrix::mat_vec(&p.a.transpose(), u)
}

/// Gauss's letter for unknown `i`: `a, b, c, …` skipping `n`, which is
/// reserved for the constant column.
pub fn letter(i: usize, mu: usize) -> String {
    if i == mu {
        return "n".into();
    }
    const LETTERS: &[u8] = b"abcdefghijklmopqrstuvwxyz";
    if mu <= LETTERS.len() {
        (LETTERS[i] as char).to_string()
    } else {
        format!("a{}", i + 1)
    }
}

/// `[xy,k]`: letters by index (the constant column is index `μ`), `k`
/// unknowns eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BracketKey {
    pub level: usize,
    pub left: usize,
    pub right: usize,
}

impl BracketKey {
    pub fn new(x: usize, y: usize, level: usize) -> Self {
        let (left, right) = if x <= y { (x, y) } else { (y, x) };
        Self { level, left, right }
    }

    pub fn render(&self, mu: usize) -> String {
        let pair = format!("{}{}", letter(self.left, mu), letter(self.right, mu));
        if self.level == 0 {
            format!("[{pair}]")
        } else {
            format!("[{pair},{}]", self.level)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    mu: usize,
    kind: ScalarKind,
    level: usize,
    entries: BTreeMap<BracketKey, Scalar>,
}

impl BracketTable {
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Highest reduction level present.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    /// Looks up `[xy,k]` in either letter order.
    pub fn get(&self, x: usize, y: usize, level: usize) -> Option<&Scalar> {
        self.entries.get(&BracketKey::new(x, y, level))
    }

    fn at(&self, x: usize, y: usize, level: usize) -> &Scalar {
        self.get(x, y, level).expect("bracket present at this level")
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BracketKey, &Scalar)> {
        self.entries.iter()
    }

    /// `[nn,μ]`, once fully reduced.
    pub fn minimum(&self) -> Option<&Scalar> {
        self.get(self.mu, self.mu, self.mu)
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{} = {}\n", k.render(self.mu), v))
            .collect()
    }

    /// Value at `x` of the `k`-th reduced linear form,
    /// `[kn,k] + Σ_{j≥k} [kj,k]·x_j` (Gauss's A, B, C, …).
    pub fn reduced_form(&self, k: usize, x: &[Rational]) -> Rational {
        let mut v = self.at(k, self.mu, k).to_rational();
        for (j, xj) in x.iter().enumerate().skip(k) {
            v += self.at(k, j, k).to_rational() * xj;
        }
        v
    }
}

/// Level-0 brackets: dot products of the observation columns and of the
/// constant column `n = −b`.
pub fn bracket_init(a: &Matrix, b: &[Scalar]) -> Result<BracketTable> {
    if b.len() != a.rows() {
        return Err(Error::ShapeMismatch {
            op: "bracket_init",
            left: a.shape(),
            right: (b.len(), 1),
        });
    }
    let mu = a.cols();
    let mut ar = Arith::new(a.kind());
    let n: Vec<Scalar> = b.iter().map(|v| ar.neg(v)).collect();
    let col = |j: usize| if j == mu { n.clone() } else { a.column(j) };
    let zero = ar.zero();
    let mut entries = BTreeMap::new();
    for x in 0..=mu {
        let cx = col(x);
        for y in x..=mu {
            let cy = col(y);
            entries.insert(BracketKey::new(x, y, 0), ar.dot(&zero, cx.iter().zip(&cy)));
        }
    }
    Ok(BracketTable {
        mu,
        kind: a.kind(),
        level: 0,
        entries,
    })
}

/// Level-0 brackets read straight off a normal system `N·x = c`; `[nn]` is
/// set to zero since no observations are at hand.
pub fn bracket_from_normal(n: &Matrix, c: &[Scalar]) -> Result<BracketTable> {
    if !n.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mu = n.cols();
    let ar = Arith::new(n.kind());
    let mut entries = BTreeMap::new();
    for x in 0..mu {
        for y in x..mu {
            entries.insert(BracketKey::new(x, y, 0), n.get(x, y).clone());
        }
        entries.insert(BracketKey::new(x, mu, 0), ar.neg(&c[x]));
    }
    entries.insert(BracketKey::new(mu, mu, 0), ar.zero());
    Ok(BracketTable {
        mu,
        kind: n.kind(),
        level: 0,
        entries,
    })
}

/// One level of `[xy,k+1] = [xy,k] − [kx,k]·[ky,k]/[kk,k]`.
pub fn bracket_reduce(t: &BracketTable) -> Result<BracketTable> {
    let k = t.level;
    if k >= t.mu {
        return Err(Error::InvalidArgument("table already fully reduced".into()));
    }
    let mut ar = Arith::new(t.kind);
    let pivot = t.at(k, k, k).clone();
    if ar.is_negligible(&pivot) {
        return Err(Error::Singular { step: k + 1 });
    }
    let mut out = t.clone();
    for x in k + 1..=t.mu {
        let ratio = ar.div(t.at(k, x, k), &pivot)?;
        for y in x..=t.mu {
            let v = ar.dot_sub(t.at(x, y, k), [(&ratio, t.at(k, y, k))]);
            out.entries.insert(BracketKey::new(x, y, k + 1), v);
        }
    }
    out.level = k + 1;
    Ok(out)
}

/// Reduces until `[nn,μ]` exists.
pub fn bracket_reduce_full(t: &BracketTable) -> Result<BracketTable> {
    let mut t = t.clone();
    while t.level < t.mu {
        t = bracket_reduce(&t)?;
    }
    Ok(t)
}

/// Sets Gauss's reduced forms `A = 0, B = 0, C = 0, …` and solves them
/// last unknown first.
pub fn gauss_reduce_solve(t: &BracketTable) -> Result<ColumnVector> {
    let t = bracket_reduce_full(t)?;
    let mu = t.mu;
    let mut ar = Arith::new(t.kind);
    let mut x = vec![ar.zero(); mu];
    for k in (0..mu).rev() {
        let pivot = t.at(k, k, k);
        if ar.is_negligible(pivot) {
            return Err(Error::Singular { step: k + 1 });
        }
        let seed = ar.neg(t.at(k, mu, k));
        let pairs: Vec<_> = (k + 1..mu).map(|j| (t.at(k, j, k), &x[j])).collect();
        x[k] = ar.dot_sub_div(&seed, pairs, pivot)?;
    }
    Ok(x)
}

/// `Ω(x) = Σ (A·x − b)²`, exactly.
pub fn sum_of_squares(a: &Matrix, x: &[Scalar], b: &[Scalar]) -> Rational {
    crate::matrix::exact_residual(a, x, b)
        .iter()
        .map(|r| r * r)
        .sum()
}

impl fmt::Display for BracketTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;
    use crate::scalar::ratio;

    #[test]
    fn mean_of_three() {
        let a = Matrix::from_i64(&[&[1], &[1], &[1]]);
        let p = LsqProblem::new(LsqCase::Case1, a.clone(), exact_vector(&[1, 2, 3])).unwrap();
        let (n, c) = build_normal(&p).unwrap();
        assert_eq!(n, Matrix::from_i64(&[&[3]]));
        assert_eq!(c, exact_vector(&[6]));
        let t = bracket_init(&a, &p.b).unwrap();
        assert_eq!(gauss_reduce_solve(&t).unwrap(), exact_vector(&[2]));
        let full = bracket_reduce_full(&t).unwrap();
        assert_eq!(full.minimum().unwrap(), &Scalar::exact(2, 1));
        assert_eq!(sum_of_squares(&a, &exact_vector(&[2]), &p.b), ratio(2, 1));
    }

    #[test]
    fn nearest_point_on_a_line() {
        let p = LsqProblem::new(LsqCase::Case2, Matrix::from_i64(&[&[1, 1]]), exact_vector(&[2])).unwrap();
        let (n, c) = build_normal(&p).unwrap();
        let t = bracket_from_normal(&n, &c).unwrap();
        let u = gauss_reduce_solve(&t).unwrap();
        assert_eq!(u, exact_vector(&[1]));
        assert_eq!(correlate_recover(&p, &u).unwrap(), exact_vector(&[1, 1]));
    }

    #[test]
    fn orthogonal_columns_do_not_interact() {
        let a = Matrix::from_i64(&[&[1, 1], &[1, -1], &[0, 0]]);
        let t = bracket_init(&a, &exact_vector(&[1, 2, 3])).unwrap();
        assert!(t.get(0, 1, 0).unwrap().is_zero());
        let t1 = bracket_reduce(&t).unwrap();
        assert_eq!(t1.get(1, 1, 1), t.get(1, 1, 0));
    }

    #[test]
    fn keys_render_like_gauss() {
        assert_eq!(BracketKey::new(1, 0, 2).render(3), "[ab,2]");
        assert_eq!(BracketKey::new(0, 3, 0).render(3), "[an]");
        assert_eq!(letter(12, 14), "m");
        assert_eq!(letter(13, 14), "o");
    }

    #[test]
    fn shape_rules() {
        let tall = Matrix::from_i64(&[&[1], &[1]]);
        assert!(LsqProblem::new(LsqCase::Case2, tall, exact_vector(&[1, 1])).is_err());
        let singular = Matrix::from_i64(&[&[1, 1], &[1, 1]]);
        let t = bracket_init(&singular, &exact_vector(&[1, 2])).unwrap();
        assert_eq!(bracket_reduce_full(&t), Err(Error::Singular { step: 2 }));
    }
}
