//! Dense-tableau primal simplex over exact rationals for Eloise's security
//! level:
//!
//! ```text
//! maximize   v
//! subject to μ · col(j) ≥ v      for every column j
//!            μ_i ≥ 0             for every row i
//!            Σ_i μ_i = 1
//! ```
//!
//! Payoffs are nonnegative, so `v ≥ 0` at every feasible point and `v` can
//! be treated as a nonnegative variable. Pivoting uses the smallest-index
//! rule, which cannot cycle. Abelard's optimal strategy is read off the
//! reduced costs of the column slacks in the final tableau.

use num_traits::{One, Signed, Zero};

use crate::matrix::GameMatrix;
use crate::rational::Rational;

/// The security-level LP of a payoff matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    payoffs: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    /// Optimal row strategy.
    pub primal: Vec<Rational>,
    /// Optimal column strategy, from the dual.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

impl LpProblem {
    pub fn from_matrix(u: &GameMatrix) -> Self {
        let payoffs = (0..u.rows())
            .map(|i| u.row(i).iter().map(|&v| Rational::from_integer(v.into())).collect())
            .collect();
        LpProblem { payoffs }
    }

    /// Panics if the payoff matrix is empty, ragged, or has a negative entry.
    pub fn from_payoffs(payoffs: Vec<Vec<Rational>>) -> Self {
        let n = payoffs.first().map_or(0, Vec::len);
        assert!(n > 0, "payoff matrix must be nonempty");
        assert!(payoffs.iter().all(|r| r.len() == n), "ragged payoff matrix");
        assert!(
            payoffs.iter().flatten().all(|v| !v.is_negative()),
            "payoffs must be nonnegative"
        );
        LpProblem { payoffs }
    }

    pub fn rows(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cols(&self) -> usize {
        self.payoffs[0].len()
    }

    /// One constraint per column, one nonnegativity bound per row, and the
    /// normalization.
    pub fn constraint_count(&self) -> usize {
        self.cols() + self.rows() + 1
    }

    pub fn solve(&self) -> LpSolution {
        let m = self.rows();
        let n = self.cols();
        // variables: μ_0..μ_{m-1}, v = m, slacks s_j = m+1+j; last column is rhs
        let v_col = m;
        let nvars = m + 1 + n;
        let rhs = nvars;
        let mut t = Tableau {
            rows: Vec::with_capacity(n + 1),
            obj: vec![Rational::zero(); nvars + 1],
            basis: Vec::with_capacity(n + 1),
            pivots: 0,
        };
        for j in 0..n {
            // v − Σ_i u_ij μ_i + s_j = 0
            let mut row = vec![Rational::zero(); nvars + 1];
            for (i, payoff) in self.payoffs.iter().enumerate() {
                row[i] = -payoff[j].clone();
            }
            row[v_col] = Rational::one();
            row[m + 1 + j] = Rational::one();
            t.rows.push(row);
            t.basis.push(m + 1 + j);
        }
        let mut norm = vec![Rational::zero(); nvars + 1];
        for x in norm.iter_mut().take(m) {
            *x = Rational::one();
        }
        norm[rhs] = Rational::one();
        t.rows.push(norm);
        t.basis.push(usize::MAX);
        t.obj[v_col] = Rational::one();

        // μ_0 enters on the normalization row; slack rows become u_0j ≥ 0
        t.pivot(n, 0);
        t.pivots = 0;

        while let Some(q) = (0..nvars).find(|&k| t.obj[k].is_positive()) {
            let p = t
                .leaving_row(q)
                .expect("v is bounded by the largest payoff");
            t.pivot(p, q);
        }

        let mut primal = vec![Rational::zero(); m];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < m {
                primal[b] = t.rows[r][rhs].clone();
            }
        }
        let value = -t.obj[rhs].clone();
        let y: Vec<Rational> = (0..n).map(|j| -t.obj[m + 1 + j].clone()).collect();
        let total: Rational = y.iter().sum();
        let dual = y.into_iter().map(|yj| yj / &total).collect();
        LpSolution {
            value,
            primal,
            dual,
            pivots: t.pivots,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds −z.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    /// Minimum-ratio row for entering column `q`, ties broken by the
    /// smallest basic variable index.
    fn leaving_row(&self, q: usize) -> Option<usize> {
        let rhs = self.obj.len() - 1;
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !row[q].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[q];
            let better = match &best {
                None => true,
                Some((br, bq)) => ratio < *bq || (ratio == *bq && self.basis[r] < self.basis[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = self.rows[p][q].recip();
        for x in self.rows[p].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[p]);
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != p {
                eliminate(row, &pivot_row, q);
            }
        }
        eliminate(&mut self.obj, &pivot_row, q);
        self.rows[p] = pivot_row;
        self.basis[p] = q;
        self.pivots += 1;
    }
}

fn eliminate(row: &mut [Rational], pivot_row: &[Rational], q: usize) {
    if row[q].is_zero() {
        return;
    }
    let f = row[q].clone();
    for (x, pv) in row.iter_mut().zip(pivot_row) {
        if !pv.is_zero() {
            *x -= &f * pv;
        }
    }
}
