//! Exact values of win-loss matrix games, with equilibrium certificates.
//!
//! [`solve_value`] is the general route (simplex). The remaining functions
//! are cheaper certificates that apply to special shapes, bounds, and an
//! independent support-enumeration oracle. Every [`ValueReport`] produced
//! here carries a pair `(μ, ν)` that passes [`verify_equilibrium`].

mod linsys;
mod simplex;
mod support;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use linsys::{solve_linear, LinearSolution};
pub use simplex::{LpProblem, LpSolution};

use crate::matrix::{
    best_pure_response_value, best_row_response_value, distinct, expected_utility, is_balanced,
    tallies, GameMatrix, MatrixError, MixedStrategy, Side,
};
use crate::rational::{fmt_pq, Rational};

/// Largest dimension accepted by the support-enumeration oracle by default.
pub const SUPPORT_ENUMERATION_LIMIT: usize = 7;
/// Row counts up to this are searched exhaustively.
pub const EXHAUSTIVE_ROW_LIMIT: usize = 15;
const GREEDY_RESTARTS: usize = 100;
const GREEDY_SEED: u64 = 0x1f_9a3e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lp,
    Balanced,
    BalancedSubmatrix,
    TrivialWin,
    TrivialLoss,
    SupportEnumeration,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Lp => "lp",
            Method::Balanced => "balanced",
            Method::BalancedSubmatrix => "balanced-submatrix",
            Method::TrivialWin => "trivial-win",
            Method::TrivialLoss => "trivial-loss",
            Method::SupportEnumeration => "support-enumeration",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The value of a game with the equilibrium that certifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueReport {
    pub value: Rational,
    pub eloise: MixedStrategy,
    pub abelard: MixedStrategy,
    pub method: Method,
}

fn fmt_vec(p: &[Rational]) -> String {
    p.iter().map(fmt_pq).collect::<Vec<_>>().join(" ")
}

impl ValueReport {
    /// `key=value` lines; rationals as `p/q`.
    pub fn to_machine(&self) -> String {
        format!(
            "value={}\nmethod={}\neloise={}\nabelard={}\n",
            fmt_pq(&self.value),
            self.method,
            fmt_vec(self.eloise.probs()),
            fmt_vec(self.abelard.probs())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValueError {
    #[error("{what}: size {found} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        found: usize,
    },
}

/// `𝒱(u)` by linear programming.
///
/// The LP is set up over the distinct rows and columns of `u`; repeated rows
/// are the same LP variable and repeated columns the same constraint. The
/// returned strategies put all weight of a class on its first member.
pub fn solve_value(u: &GameMatrix) -> ValueReport {
    let d = distinct(u);
    let sol = LpProblem::from_matrix(&d.matrix).solve();
    let mut mu = vec![Rational::zero(); u.rows()];
    for (k, p) in sol.primal.into_iter().enumerate() {
        mu[d.rows[k]] = p;
    }
    let mut nu = vec![Rational::zero(); u.cols()];
    for (k, p) in sol.dual.into_iter().enumerate() {
        nu[d.cols[k]] = p;
    }
    let report = ValueReport {
        value: sol.value,
        eloise: MixedStrategy::new(mu, Side::Row).expect("primal is a distribution"),
        abelard: MixedStrategy::new(nu, Side::Column).expect("dual is a distribution"),
        method: Method::Lp,
    };
    debug_assert!(certifies(u, &report));
    report
}

/// Eloise's security level `max_μ min_ν U(μ, ν)` from her LP on `u` as is.
pub fn eloise_security_level(u: &GameMatrix) -> Rational {
    LpProblem::from_matrix(u).solve().value
}

/// Abelard's security level `min_ν max_μ U(μ, ν)`, computed as his own
/// maximization problem: `1 − max_ν min_μ (1 − U)` on `(1 − u)ᵀ`.
pub fn abelard_security_level(u: &GameMatrix) -> Rational {
    Rational::one() - LpProblem::from_matrix(&u.complement().transpose()).solve().value
}

pub fn solve_by_support_enumeration(u: &GameMatrix) -> Result<ValueReport, ValueError> {
    solve_by_support_enumeration_with_limit(u, SUPPORT_ENUMERATION_LIMIT)
}

pub fn solve_by_support_enumeration_with_limit(
    u: &GameMatrix,
    limit: usize,
) -> Result<ValueReport, ValueError> {
    let found = u.rows().max(u.cols());
    if found > limit {
        return Err(ValueError::TooLarge {
            what: "support enumeration",
            limit,
            found,
        });
    }
    let f = support::enumerate(u);
    Ok(ValueReport {
        value: f.value,
        eloise: f.eloise,
        abelard: f.abelard,
        method: Method::SupportEnumeration,
    })
}

/// `(floor, ceil)` as the payoffs of the uniform strategies against best
/// replies: `min_ν U(μ̄, ν)` and `max_μ U(μ, ν̄)`.
pub fn uniform_bounds(u: &GameMatrix) -> (Rational, Rational) {
    let mu = MixedStrategy::uniform(u.rows(), Side::Row);
    let nu = MixedStrategy::uniform(u.cols(), Side::Column);
    let (lo, _) = best_pure_response_value(u, &mu).expect("dimensions match");
    let (hi, _) = best_row_response_value(u, &nu).expect("dimensions match");
    (lo, hi)
}

/// For a balanced game the uniform pair is an equilibrium and
/// `𝒱 = floor = ceil`.
pub fn balanced_value(u: &GameMatrix) -> Option<ValueReport> {
    if !is_balanced(u) {
        return None;
    }
    Some(ValueReport {
        value: tallies(u).floor,
        eloise: MixedStrategy::uniform(u.rows(), Side::Row),
        abelard: MixedStrategy::uniform(u.cols(), Side::Column),
        method: Method::Balanced,
    })
}

/// A pure winning strategy for either player.
pub fn detect_trivial(u: &GameMatrix) -> Option<ValueReport> {
    if let Some(i) = u.has_all_ones_row() {
        return Some(ValueReport {
            value: Rational::one(),
            eloise: MixedStrategy::point(u.rows(), i, Side::Row),
            abelard: MixedStrategy::point(u.cols(), 0, Side::Column),
            method: Method::TrivialWin,
        });
    }
    if let Some(j) = u.has_all_zeros_col() {
        return Some(ValueReport {
            value: Rational::zero(),
            eloise: MixedStrategy::point(u.rows(), 0, Side::Row),
            abelard: MixedStrategy::point(u.cols(), j, Side::Column),
            method: Method::TrivialLoss,
        });
    }
    None
}

/// True iff neither player gains by a pure deviation from `(μ, ν)`.
pub fn verify_equilibrium(
    u: &GameMatrix,
    mu: &MixedStrategy,
    nu: &MixedStrategy,
) -> Result<bool, MatrixError> {
    let here = expected_utility(u, mu, nu)?;
    let (best_row, _) = best_row_response_value(u, nu)?;
    let (best_col, _) = best_pure_response_value(u, mu)?;
    Ok(best_row <= here && best_col >= here)
}

/// The report's pair is an equilibrium and pays exactly the claimed value.
pub fn certifies(u: &GameMatrix, r: &ValueReport) -> bool {
    matches!(verify_equilibrium(u, &r.eloise, &r.abelard), Ok(true))
        && expected_utility(u, &r.eloise, &r.abelard).as_ref() == Ok(&r.value)
}

/// Cheapest applicable certificate: a pure winning strategy, then the
/// balanced shortcut, then the LP.
pub fn best_report(u: &GameMatrix) -> ValueReport {
    detect_trivial(u)
        .or_else(|| balanced_value(u))
        .unwrap_or_else(|| solve_value(u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

/// Column bitmasks over the rows of `u`, one per distinct column.
fn column_masks(u: &GameMatrix, rows: &[usize]) -> Vec<u64> {
    let d = distinct(u);
    d.cols
        .iter()
        .map(|&j| {
            rows.iter()
                .enumerate()
                .filter(|&(_, &i)| u.get(i, j) == 1)
                .fold(0u64, |acc, (k, _)| acc | 1 << k)
        })
        .collect()
}

fn mask_to_set(mask: u64, rows: &[usize]) -> BTreeSet<usize> {
    (0..rows.len())
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| rows[k])
        .collect()
}

/// `(colmin, |R|)` of the row submatrix selected by `mask`.
fn floor_of(mask: u64, cols: &[u64]) -> (u32, u32) {
    let colmin = cols.iter().map(|c| (c & mask).count_ones()).min().unwrap_or(0);
    (colmin, mask.count_ones())
}

fn better(a: (u32, u32), b: (u32, u32)) -> bool {
    // a.0/a.1 > b.0/b.1
    (a.0 as u64) * (b.1 as u64) > (b.0 as u64) * (a.1 as u64)
}

/// `max floor(u′)` over nonempty row submatrices `u′`, a lower bound on the
/// value, together with the selected rows.
pub fn submatrix_lower_bound(
    u: &GameMatrix,
    mode: SearchMode,
) -> Result<(Rational, BTreeSet<usize>), ValueError> {
    let all: Vec<usize> = (0..u.rows()).collect();
    let (score, set) = match mode {
        SearchMode::Exhaustive => {
            if u.rows() > EXHAUSTIVE_ROW_LIMIT {
                return Err(ValueError::TooLarge {
                    what: "exhaustive submatrix search",
                    limit: EXHAUSTIVE_ROW_LIMIT,
                    found: u.rows(),
                });
            }
            let cols = column_masks(u, &all);
            let mut best = (1u64, floor_of(1, &cols));
            for mask in 2..(1u64 << u.rows()) {
                let s = floor_of(mask, &cols);
                if better(s, best.1) {
                    best = (mask, s);
                }
            }
            (best.1, mask_to_set(best.0, &all))
        }
        SearchMode::Greedy => greedy_floor(u),
    };
    Ok((
        Rational::new(BigInt::from(score.0), BigInt::from(score.1)),
        set,
    ))
}

fn greedy_floor(u: &GameMatrix) -> ((u32, u32), BTreeSet<usize>) {
    let m = u.rows();
    let cols: Vec<Vec<u8>> = distinct(u).cols.iter().map(|&j| u.column(j)).collect();
    let score = |sel: &[bool]| -> (u32, u32) {
        let size = sel.iter().filter(|&&b| b).count() as u32;
        let colmin = cols
            .iter()
            .map(|c| c.iter().zip(sel).filter(|&(&v, &s)| s && v == 1).count() as u32)
            .min()
            .unwrap_or(0);
        (colmin, size)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(GREEDY_SEED);
    let mut best_sel = vec![true; m];
    let mut best = score(&best_sel);
    for restart in 0..GREEDY_RESTARTS {
        let mut sel: Vec<bool> = if restart == 0 {
            vec![true; m]
        } else {
            (0..m).map(|_| rng.gen_bool(0.5)).collect()
        };
        if !sel.iter().any(|&b| b) {
            sel[rng.gen_range(0..m)] = true;
        }
        let mut cur = score(&sel);
        // single-row add/drop hill climb
        loop {
            let mut moved = false;
            for k in 0..m {
                if sel[k] && cur.1 == 1 {
                    continue;
                }
                sel[k] = !sel[k];
                let s = score(&sel);
                if better(s, cur) {
                    cur = s;
                    moved = true;
                } else {
                    sel[k] = !sel[k];
                }
            }
            if !moved {
                break;
            }
        }
        if better(cur, best) {
            best = cur;
            best_sel = sel;
        }
    }
    let set = (0..m).filter(|&i| best_sel[i]).collect();
    (best, set)
}

/// Looks for a balanced row submatrix `u′` with `rowmax(u′) = rowmax(u)`.
/// When one exists, `𝒱(u) = rowmax(u)/n` and the pair (uniform on the
/// rows of `u′`, uniform on all columns) is an equilibrium of `u`.
pub fn balanced_submatrix_certificate(u: &GameMatrix) -> Option<ValueReport> {
    let b = tallies(u);
    // every row of such a u′ has the maximal row sum
    let cands: Vec<usize> = b.rowargmax.iter().copied().collect();
    let rows = if cands.len() <= EXHAUSTIVE_ROW_LIMIT {
        let cols = column_masks(u, &cands);
        (1u64..(1u64 << cands.len()))
            .find(|&mask| column_balanced(mask, &cols))
            .map(|mask| mask_to_set(mask, &cands))
    } else {
        greedy_balanced(u, &cands)
    }?;
    let report = ValueReport {
        value: b.ceil.clone(),
        eloise: MixedStrategy::uniform_on(u.rows(), rows, Side::Row),
        abelard: MixedStrategy::uniform(u.cols(), Side::Column),
        method: Method::BalancedSubmatrix,
    };
    certifies(u, &report).then_some(report)
}

fn column_balanced(mask: u64, cols: &[u64]) -> bool {
    let first = (cols[0] & mask).count_ones();
    cols.iter().all(|c| (c & mask).count_ones() == first)
}

fn greedy_balanced(u: &GameMatrix, cands: &[usize]) -> Option<BTreeSet<usize>> {
    let cols: Vec<Vec<u8>> = distinct(u)
        .cols
        .iter()
        .map(|&j| cands.iter().map(|&i| u.get(i, j)).collect())
        .collect();
    let spread = |sel: &[bool]| -> usize {
        let sums = cols
            .iter()
            .map(|c| c.iter().zip(sel).filter(|&(&v, &s)| s && v == 1).count());
        let (lo, hi) = sums.fold((usize::MAX, 0), |(lo, hi), s| (lo.min(s), hi.max(s)));
        hi - lo
    };
    let k = cands.len();
    let mut rng = ChaCha8Rng::seed_from_u64(GREEDY_SEED);
    for restart in 0..GREEDY_RESTARTS {
        let mut sel: Vec<bool> = if restart == 0 {
            vec![true; k]
        } else {
            (0..k).map(|_| rng.gen_bool(0.5)).collect()
        };
        if !sel.iter().any(|&b| b) {
            sel[rng.gen_range(0..k)] = true;
        }
        let mut cur = spread(&sel);
        while cur > 0 {
            let mut moved = false;
            for x in 0..k {
                if sel[x] && sel.iter().filter(|&&b| b).count() == 1 {
                    continue;
                }
                sel[x] = !sel[x];
                let s = spread(&sel);
                if s < cur {
                    cur = s;
                    moved = true;
                } else {
                    sel[x] = !sel[x];
                }
            }
            if !moved {
                break;
            }
        }
        if cur == 0 {
            return Some((0..k).filter(|&x| sel[x]).map(|x| cands[x]).collect());
        }
    }
    None
}

/// The system obtained from Eloise's LP by turning every `μ·col(j) ≥ v`
/// into an equality, together with `Σ μ = 1`. Unknowns are `μ_0..μ_{m−1}`
/// followed by `v`.
pub fn equal_payoff_system(u: &GameMatrix) -> LinearSolution {
    let m = u.rows();
    let mut rows = Vec::with_capacity(u.cols() + 1);
    let mut rhs = Vec::with_capacity(u.cols() + 1);
    for j in 0..u.cols() {
        let mut row: Vec<Rational> = (0..m)
            .map(|i| Rational::from_integer(u.get(i, j).into()))
            .collect();
        row.push(-Rational::one());
        rows.push(row);
        rhs.push(Rational::zero());
    }
    let mut norm = vec![Rational::one(); m];
    norm.push(Rational::zero());
    rows.push(norm);
    rhs.push(Rational::one());
    solve_linear(rows, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[u8]]) -> GameMatrix {
        GameMatrix::from_rows(rows).unwrap()
    }

    fn first() -> GameMatrix {
        m(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[1, 0, 1, 0], &[1, 1, 1, 0]])
    }

    fn second() -> GameMatrix {
        m(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[1, 0, 1, 0], &[1, 1, 1, 1]])
    }

    fn third() -> GameMatrix {
        m(&[&[1, 0, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[0, 1, 0, 1]])
    }

    use crate::matrix::tests::{eq9, eq9_system};

    #[test]
    fn worked_matrices() {
        assert_eq!(solve_value(&first()).value, int(0));
        assert_eq!(solve_value(&second()).value, int(1));
        let r = solve_value(&third());
        assert_eq!(r.value, ratio(2, 5));
        assert_eq!(
            r.eloise.probs(),
            &[ratio(2, 5), ratio(1, 5), ratio(1, 5), ratio(1, 5)]
        );
        assert_eq!(solve_value(&eq9()).value, ratio(1, 3));
        assert_eq!(solve_value(&eq9_system()).value, ratio(3, 7));
        for n in 1..7 {
            assert_eq!(solve_value(&GameMatrix::identity(n)).value, ratio(1, n as i64));
        }
    }

    #[test]
    fn reports_certify() {
        for u in [first(), second(), third(), eq9(), eq9_system()] {
            let r = solve_value(&u);
            assert!(certifies(&u, &r));
            assert_eq!(best_pure_response_value(&u, &r.eloise).unwrap().0, r.value);
            assert_eq!(best_row_response_value(&u, &r.abelard).unwrap().0, r.value);
        }
    }

    #[test]
    fn support_enumeration_examples() {
        assert_eq!(solve_by_support_enumeration(&third()).unwrap().value, ratio(2, 5));
        assert_eq!(
            solve_by_support_enumeration(&GameMatrix::filled(1, 1, 1)).unwrap().value,
            int(1)
        );
        assert!(matches!(
            solve_by_support_enumeration(&GameMatrix::identity(8)),
            Err(ValueError::TooLarge { .. })
        ));
    }

    #[test]
    fn uniform_bounds_examples() {
        assert_eq!(uniform_bounds(&eq9()), (ratio(1, 5), ratio(1, 2)));
        assert_eq!(uniform_bounds(&GameMatrix::identity(4)), (ratio(1, 4), ratio(1, 4)));
        assert_eq!(uniform_bounds(&GameMatrix::filled(2, 3, 1)), (int(1), int(1)));
    }

    #[test]
    fn balanced_examples() {
        let r = balanced_value(&GameMatrix::identity(5)).unwrap();
        assert_eq!(r.value, ratio(1, 5));
        assert_eq!(r.eloise, MixedStrategy::uniform(5, Side::Row));
        assert!(balanced_value(&eq9()).is_none());
        assert_eq!(balanced_value(&GameMatrix::filled(2, 2, 1)).unwrap().value, int(1));
    }

    #[test]
    fn submatrix_bound_examples() {
        let (b, rows) = submatrix_lower_bound(&second(), SearchMode::Exhaustive).unwrap();
        assert_eq!((b, rows), (int(1), BTreeSet::from([3])));
        let (b, rows) = submatrix_lower_bound(&GameMatrix::identity(3), SearchMode::Exhaustive).unwrap();
        assert_eq!((b, rows), (ratio(1, 3), BTreeSet::from([0, 1, 2])));
        let (b, _) = submatrix_lower_bound(&GameMatrix::filled(1, 4, 0), SearchMode::Exhaustive).unwrap();
        assert_eq!(b, int(0));
        let (g, _) = submatrix_lower_bound(&eq9(), SearchMode::Greedy).unwrap();
        assert!(g <= ratio(1, 3));
        assert!(matches!(
            submatrix_lower_bound(&GameMatrix::filled(16, 2, 0), SearchMode::Exhaustive),
            Err(ValueError::TooLarge { .. })
        ));
    }

    #[test]
    fn balanced_submatrix_examples() {
        if let Some(r) = balanced_submatrix_certificate(&eq9()) {
            assert!(certifies(&eq9(), &r));
        }
        let id = GameMatrix::identity(4);
        let r = balanced_submatrix_certificate(&id).unwrap();
        assert_eq!(r.eloise, MixedStrategy::uniform(4, Side::Row));

        let dup = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let r = balanced_submatrix_certificate(&dup).unwrap();
        assert_eq!(r.value, ratio(1, 3));
        assert_eq!(r.eloise.support(), vec![0, 1, 2]);
        assert_eq!(r.method, Method::BalancedSubmatrix);
    }

    #[test]
    fn verify_examples() {
        let id = GameMatrix::identity(2);
        let mu = MixedStrategy::uniform(2, Side::Row);
        let nu = MixedStrategy::uniform(2, Side::Column);
        assert!(verify_equilibrium(&id, &mu, &nu).unwrap());
        let pure = MixedStrategy::point(2, 0, Side::Row);
        assert!(!verify_equilibrium(&id, &pure, &nu).unwrap());
        let one = GameMatrix::filled(1, 1, 1);
        assert!(verify_equilibrium(
            &one,
            &MixedStrategy::point(1, 0, Side::Row),
            &MixedStrategy::point(1, 0, Side::Column)
        )
        .unwrap());
    }

    #[test]
    fn trivial_examples() {
        let r = detect_trivial(&first()).unwrap();
        assert_eq!((r.value.clone(), r.method), (int(0), Method::TrivialLoss));
        assert!(certifies(&first(), &r));
        let r = detect_trivial(&second()).unwrap();
        assert_eq!((r.value.clone(), r.method), (int(1), Method::TrivialWin));
        assert!(certifies(&second(), &r));
        assert!(detect_trivial(&GameMatrix::identity(2)).is_none());
    }

    #[test]
    fn equalities_for_eq9_are_inconsistent() {
        assert_eq!(equal_payoff_system(&eq9_system()), LinearSolution::Inconsistent);
        assert_eq!(equal_payoff_system(&eq9()), LinearSolution::Inconsistent);
        // for the third matrix the equalized system is solvable and unique
        assert_eq!(
            equal_payoff_system(&third()),
            LinearSolution::Unique(vec![ratio(2, 5), ratio(1, 5), ratio(1, 5), ratio(1, 5), ratio(2, 5)])
        );
    }

    #[test]
    fn machine_format() {
        let r = solve_value(&GameMatrix::identity(2));
        assert_eq!(
            r.to_machine(),
            "value=1/2\nmethod=lp\neloise=1/2 1/2\nabelard=1/2 1/2\n"
        );
    }

    #[test]
    fn duplicated_columns_keep_value() {
        let u = m(&[&[1, 0, 0, 1], &[0, 1, 1, 0]]);
        let r = solve_value(&u);
        assert_eq!(r.value, ratio(1, 2));
        assert!(certifies(&u, &r));
    }
}
