//! Support enumeration: an LP-free route to the value, used to cross-check
//! the simplex solver.
//!
//! For every pair of equal-size supports `(I, J)` it solves the square
//! indifference systems
//!
//! ```text
//! Σ_{i∈I} μ_i u(i, j) = v  (j ∈ J),   Σ μ_i = 1
//! Σ_{j∈J} ν_j u(i, j) = w  (i ∈ I),   Σ ν_j = 1
//! ```
//!
//! and accepts the first nonnegative solution with `v = w` that survives
//! every pure deviation. Every finite zero-sum game has an extreme optimal
//! pair arising from such a square kernel, so the search always succeeds.

use num_traits::{One, Signed, Zero};

use super::linsys::{solve_linear, LinearSolution};
use crate::matrix::{GameMatrix, MixedStrategy, Side};
use crate::rational::Rational;

pub(crate) struct Found {
    pub value: Rational,
    pub eloise: MixedStrategy,
    pub abelard: MixedStrategy,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Solve `Σ_{a∈A} p_a payoff(a, b) = level` for `b ∈ B`, `Σ p = 1`.
fn indifference(
    a_set: &[usize],
    b_set: &[usize],
    payoff: impl Fn(usize, usize) -> u8,
) -> Option<(Vec<Rational>, Rational)> {
    let k = a_set.len();
    let mut rows = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for &b in b_set {
        let mut row: Vec<Rational> = a_set
            .iter()
            .map(|&a| Rational::from_integer(payoff(a, b).into()))
            .collect();
        row.push(-Rational::one());
        rows.push(row);
        rhs.push(Rational::zero());
    }
    let mut norm = vec![Rational::one(); k];
    norm.push(Rational::zero());
    rows.push(norm);
    rhs.push(Rational::one());
    match solve_linear(rows, rhs) {
        LinearSolution::Unique(mut x) => {
            let level = x.pop().expect("level variable");
            if x.iter().any(Signed::is_negative) {
                None
            } else {
                Some((x, level))
            }
        }
        _ => None,
    }
}

pub(crate) fn enumerate(u: &GameMatrix) -> Found {
    let (m, n) = (u.rows(), u.cols());
    for k in 1..=m.min(n) {
        let row_sets = subsets(m, k);
        let col_sets = subsets(n, k);
        for rows in &row_sets {
            for cols in &col_sets {
                let Some((mu_s, v)) = indifference(rows, cols, |i, j| u.get(i, j)) else {
                    continue;
                };
                let Some((nu_s, w)) = indifference(cols, rows, |j, i| u.get(i, j)) else {
                    continue;
                };
                if v != w {
                    continue;
                }
                let mut mu = vec![Rational::zero(); m];
                for (&i, p) in rows.iter().zip(mu_s) {
                    mu[i] = p;
                }
                let mut nu = vec![Rational::zero(); n];
                for (&j, p) in cols.iter().zip(nu_s) {
                    nu[j] = p;
                }
                // no column may push Eloise below v, no row lift her above it
                let col_ok = (0..n).all(|j| {
                    let s: Rational = (0..m).filter(|&i| u.get(i, j) == 1).map(|i| &mu[i]).sum();
                    s >= v
                });
                let row_ok = col_ok
                    && (0..m).all(|i| {
                        let s: Rational = (0..n).filter(|&j| u.get(i, j) == 1).map(|j| &nu[j]).sum();
                        s <= v
                    });
                if row_ok {
                    return Found {
                        value: v,
                        eloise: MixedStrategy::new(mu, Side::Row).expect("normalized"),
                        abelard: MixedStrategy::new(nu, Side::Column).expect("normalized"),
                    };
                }
            }
        }
    }
    unreachable!("every finite zero-sum game has a square equilibrium kernel")
}
