//! Exact Gauss–Jordan elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    /// Consistent with free variables; one particular solution (free
    /// variables set to zero) and the rank.
    Underdetermined { particular: Vec<Rational>, rank: usize },
    Inconsistent,
}

/// Solve `a · x = b`. `a` is row-major with every row of equal length.
// row operations read two rows of `a` at once, so index loops stay
#[allow(clippy::needless_range_loop)]
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> LinearSolution {
    let rows = a.len();
    assert_eq!(rows, b.len(), "one right-hand side per equation");
    let cols = a.first().map_or(0, Vec::len);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for k in c..cols {
            a[r][k] = &a[r][k] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for k in c..cols {
                if !a[r][k].is_zero() {
                    let d = &f * &a[r][k];
                    a[i][k] -= d;
                }
            }
            let d = &f * &b[r];
            b[i] -= d;
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = b[i].clone();
    }
    if pivot_cols.len() == cols {
        LinearSolution::Unique(x)
    } else {
        LinearSolution::Underdetermined {
            particular: x,
            rank: pivot_cols.len(),
        }
    }
}
