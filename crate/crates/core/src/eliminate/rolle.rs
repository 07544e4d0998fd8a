//! Rolle's two-column method: a direction column of ever-smaller classes of
//! equations, then a return column that substitutes numbers back.

use crate::error::{Error, Result};
use crate::matrix::ColumnVector;
use crate::ops::Arith;
use crate::scalar::Scalar;

use super::{render_equation, render_linear, LinearSystem};

/// A numbered equation of the direction column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RolleRow {
    pub number: usize,
    /// `(variable, from, into)`: the variable taken from equation `from`
    /// and substituted into equation `into`.
    pub substitution: Option<(usize, usize, usize)>,
    pub coeffs: Vec<Scalar>,
    pub rhs: Scalar,
}

/// `var = constant + Σ coefficient·other` in the return column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RolleAssignment {
    pub number: usize,
    pub var: usize,
    pub constant: Scalar,
    pub terms: Vec<(usize, Scalar)>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RolleTrace {
    pub names: Vec<String>,
    pub direction: Vec<Vec<RolleRow>>,
    pub retour: Vec<Vec<RolleAssignment>>,
}

const CLASS_NAMES: [&str; 4] = ["Premiere", "Seconde", "Troisi\u{e9}me", "Quatri\u{e9}me"];

fn class_name(k: usize) -> String {
    CLASS_NAMES
        .get(k)
        .map_or_else(|| format!("Class {}", k + 1), |s| format!("{s} Classe"))
}

impl RolleTrace {
    pub fn equation(&self, row: &RolleRow) -> String {
        render_equation(&row.coeffs, &row.rhs, &self.names)
    }

    pub fn assignment(&self, a: &RolleAssignment) -> String {
        let terms = a.terms.iter().map(|(j, c)| (c.clone(), self.names[*j].as_str()));
        let rhs = if a.terms.is_empty() {
            a.constant.render_table()
        } else {
            render_linear(terms, Some(&a.constant))
        };
        format!("{} = {}", self.names[a.var], rhs)
    }

    pub fn row(&self, number: usize) -> Option<&RolleRow> {
        self.direction.iter().flatten().find(|r| r.number == number)
    }

    /// Both columns, one after the other.
    pub fn render(&self) -> String {
        let mut out = String::from("Columne de direction\n");
        for (k, class) in self.direction.iter().enumerate() {
            out.push_str(&format!("  {}\n", class_name(k)));
            for row in class {
                let note = row.substitution.map_or(String::new(), |(v, from, into)| {
                    format!("{} from {from} sub. into {into} \u{21d2} ", self.names[v])
                });
                out.push_str(&format!("    {note}{}) {}\n", row.number, self.equation(row)));
            }
        }
        out.push_str("Columne de retour\n");
        for (k, class) in self.retour.iter().enumerate() {
            out.push_str(&format!("  {}\n", class_name(k)));
            for a in class {
                out.push_str(&format!("    {} ({} \u{21d0} {}\n", self.assignment(a), a.number, a.note));
            }
        }
        out
    }
}

/// Solves in natural order without reordering; a zero leading coefficient
/// stops the computation.
pub fn rolle_solve(sys: &LinearSystem) -> Result<(ColumnVector, RolleTrace)> {
    sys.require_square()?;
    let n = sys.n();
    let mut ar = Arith::new(sys.kind());
    let mut number = 0;
    let mut class: Vec<RolleRow> = (0..n)
        .map(|i| {
            number += 1;
            RolleRow {
                number,
                substitution: None,
                coeffs: sys.a.row(i).to_vec(),
                rhs: sys.b[i].clone(),
            }
        })
        .collect();
    let mut direction = Vec::new();
    for k in 0..n {
        let lead = class[0].clone();
        if ar.is_negligible(&lead.coeffs[k]) {
            return Err(Error::Singular { step: k + 1 });
        }
        let mut next = Vec::new();
        for row in &class[1..] {
            number += 1;
            let mut coeffs = row.coeffs.clone();
            let mut rhs = row.rhs.clone();
            if !row.coeffs[k].is_zero() {
                let m = ar.div(&row.coeffs[k], &lead.coeffs[k])?;
                for j in k + 1..n {
                    coeffs[j] = ar.dot_sub(&row.coeffs[j], [(&m, &lead.coeffs[j])]);
                }
                coeffs[k] = ar.zero();
                rhs = ar.dot_sub(&row.rhs, [(&m, &lead.rhs)]);
            }
            next.push(RolleRow {
                number,
                substitution: Some((k, lead.number, row.number)),
                coeffs,
                rhs,
            });
        }
        direction.push(std::mem::replace(&mut class, next));
    }

    // Expressions for each unknown from the leading row of its class, latest
    // unknown first.
    let mut number = 0;
    let mut current = Vec::new();
    for k in (0..n).rev() {
        let lead = &direction[k][0];
        let pivot = &lead.coeffs[k];
        let constant = ar.div(&lead.rhs, pivot)?;
        let mut terms = Vec::new();
        for j in (k + 1..n).rev() {
            if !lead.coeffs[j].is_zero() {
                let c = ar.div(&lead.coeffs[j], pivot)?;
                terms.push((j, ar.neg(&c)));
            }
        }
        number += 1;
        current.push(RolleAssignment {
            number,
            var: k,
            constant,
            terms,
            note: format!("{} from left column {}", sys.names[k], lead.number),
        });
    }
    let mut retour = vec![current.clone()];
    let mut solution = vec![ar.zero(); n];
    loop {
        let solved = current[0].clone();
        solution[solved.var] = solved.constant.clone();
        if current.len() == 1 {
            break;
        }
        let mut next = Vec::new();
        for (offset, a) in current[1..].iter().enumerate() {
            number += 1;
            let mut constant = a.constant.clone();
            let mut terms = Vec::new();
            for (j, c) in &a.terms {
                if *j == solved.var {
                    constant = ar.dot(&constant, [(c, &solved.constant)]);
                } else {
                    terms.push((*j, c.clone()));
                }
            }
            next.push(RolleAssignment {
                number,
                var: a.var,
                constant,
                terms,
                note: format!(
                    "{} from {} sub. into {}",
                    sys.names[solved.var],
                    solved.number,
                    current[offset + 1].number
                ),
            });
        }
        retour.push(next.clone());
        current = next;
    }
    Ok((
        solution,
        RolleTrace {
            names: sys.names.clone(),
            direction,
            retour,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::exact_vector;

    fn rolle_system() -> LinearSystem {
        // Columns in the order Rolle eliminated them: x, v, z, y.
        LinearSystem::from_i64(&[&[1, 0, 1, 1, 6], &[1, 1, 0, 1, 7], &[1, 1, 1, 0, 8], &[0, 1, 1, 1, 9]])
            .with_names(&["x", "v", "z", "y"])
            .unwrap()
    }

    #[test]
    fn rolle_figure() {
        let (x, t) = rolle_solve(&rolle_system()).unwrap();
        assert_eq!(x, exact_vector(&[1, 4, 3, 2]));
        let eq = |k| t.equation(t.row(k).unwrap());
        assert_eq!(eq(5), "v \u{2212} z = 1");
        assert_eq!(eq(6), "v \u{2212} y = 2");
        assert_eq!(eq(8), "z \u{2212} y = 1");
        assert_eq!(eq(10), "3y = 6");
        let sizes: Vec<_> = t.direction.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 3, 2, 1]);
        let first: Vec<_> = t.retour[0].iter().map(|a| t.assignment(a)).collect();
        assert_eq!(first, vec!["y = 2", "z = 1 + y", "v = 1 + z", "x = 6 \u{2212} y \u{2212} z"]);
        let second: Vec<_> = t.retour[1].iter().map(|a| t.assignment(a)).collect();
        assert_eq!(second, vec!["z = 3", "v = 1 + z", "x = 4 \u{2212} z"]);
        assert_eq!(t.assignment(&t.retour[3][0]), "x = 1");
        assert_eq!(t.retour[3][0].number, 10);
        assert!(t.render().contains("10) 3y = 6"));
    }

    #[test]
    fn single_equation() {
        let (x, t) = rolle_solve(&LinearSystem::from_i64(&[&[5, 10]])).unwrap();
        assert_eq!(x, exact_vector(&[2]));
        assert_eq!(t.direction.len(), 1);
    }

    #[test]
    fn zero_pivot_stops() {
        let sys = LinearSystem::from_i64(&[&[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(rolle_solve(&sys), Err(Error::Singular { step: 1 }));
    }
}
