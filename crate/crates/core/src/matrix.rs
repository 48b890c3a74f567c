//! Win-loss zero-sum matrix games.
//!
//! Rows are Eloise's pure strategies, columns Abelard's; an entry is
//! Eloise's payoff, 0 or 1. All probabilities are exact rationals.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("entry ({row}, {col}) is {value}; entries must be 0 or 1")]
    NonBinary { row: usize, col: usize, value: u8 },
    #[error("expected {expected} entries, got {found}")]
    Shape { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed matrix text: {0}")]
    Malformed(String),
    #[error("empty row selection")]
    EmptySelection,
    #[error("row index {0} out of range")]
    RowOutOfRange(usize),
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl GameMatrix {
    /// Row-major `rows × cols` matrix.
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::Shape {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|&v| v > 1) {
            return Err(MatrixError::NonBinary {
                row: k / cols,
                col: k % cols,
                value: data[k],
            });
        }
        Ok(GameMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(MatrixError::Shape {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        GameMatrix::new(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        GameMatrix::new(n, n, data).expect("identity of positive size")
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Self {
        GameMatrix::new(rows, cols, vec![value; rows * cols]).expect("filled matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| v as usize).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.cols];
        for i in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(i)) {
                *s += v as usize;
            }
        }
        sums
    }

    /// Abelard's payoff matrix, `1 − u`.
    pub fn complement(&self) -> Self {
        GameMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| 1 - v).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        GameMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn has_all_ones_row(&self) -> Option<usize> {
        (0..self.rows).find(|&i| self.row(i).iter().all(|&v| v == 1))
    }

    pub fn has_all_zeros_col(&self) -> Option<usize> {
        self.col_sums().iter().position(|&s| s == 0)
    }

    /// Text form: `m n` on the first line, then `m` lines of `n` digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<&str> = self
                .row(i)
                .iter()
                .map(|&v| if v == 1 { "1" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Malformed("missing `m n` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| MatrixError::Malformed(format!("header: {e}")))?;
        let [m, n] = dims[..] else {
            return Err(MatrixError::Malformed("header must be `m n`".into()));
        };
        let mut data = Vec::with_capacity(m * n);
        let mut count = 0;
        for (r, line) in lines.enumerate() {
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != n {
                return Err(MatrixError::Malformed(format!(
                    "row {r} has {} entries, expected {n}",
                    entries.len()
                )));
            }
            for (c, e) in entries.into_iter().enumerate() {
                match e {
                    "0" => data.push(0),
                    "1" => data.push(1),
                    other => {
                        return Err(MatrixError::Malformed(format!(
                            "entry ({r}, {c}) is `{other}`, expected 0 or 1"
                        )))
                    }
                }
            }
            count += 1;
        }
        if count != m {
            return Err(MatrixError::Malformed(format!("expected {m} rows, found {count}")));
        }
        GameMatrix::new(m, n, data)
    }
}

impl fmt::Display for GameMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Row,
    Column,
}

/// A probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    probs: Vec<Rational>,
    side: Side,
}

impl MixedStrategy {
    pub fn new(probs: Vec<Rational>, side: Side) -> Result<Self, MatrixError> {
        if probs.is_empty() {
            return Err(MatrixError::InvalidStrategy("no pure strategies".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(MatrixError::InvalidStrategy(format!("negative probability {p}")));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(MatrixError::InvalidStrategy(format!("probabilities sum to {total}")));
        }
        Ok(MixedStrategy { probs, side })
    }

    pub fn uniform(len: usize, side: Side) -> Self {
        Self::uniform_on(len, 0..len, side)
    }

    /// Uniform over `support`, zero elsewhere. Panics on an empty support.
    pub fn uniform_on(len: usize, support: impl IntoIterator<Item = usize>, side: Side) -> Self {
        let support: BTreeSet<usize> = support.into_iter().collect();
        assert!(!support.is_empty(), "uniform strategy needs a nonempty support");
        let p = Rational::new(BigInt::one(), BigInt::from(support.len()));
        let probs = (0..len)
            .map(|i| if support.contains(&i) { p.clone() } else { Rational::zero() })
            .collect();
        MixedStrategy { probs, side }
    }

    pub fn point(len: usize, index: usize, side: Side) -> Self {
        Self::uniform_on(len, [index], side)
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&i| !self.probs[i].is_zero())
            .collect()
    }

    /// Integer numerators over the least common denominator.
    fn scaled(&self) -> (Vec<BigInt>, BigInt) {
        let denom = self
            .probs
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let numers = self
            .probs
            .iter()
            .map(|p| p.numer() * (&denom / p.denom()))
            .collect();
        (numers, denom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub floor: Rational,
    pub ceil: Rational,
    pub colmin: usize,
    pub rowmax: usize,
    pub colargmin: BTreeSet<usize>,
    pub rowargmax: BTreeSet<usize>,
}

/// Column and row tallies: `floor = colmin/m`, `ceil = rowmax/n`.
pub fn tallies(u: &GameMatrix) -> Bounds {
    let cs = u.col_sums();
    let rs = u.row_sums();
    let colmin = *cs.iter().min().expect("nonempty");
    let rowmax = *rs.iter().max().expect("nonempty");
    Bounds {
        floor: Rational::new(BigInt::from(colmin), BigInt::from(u.rows())),
        ceil: Rational::new(BigInt::from(rowmax), BigInt::from(u.cols())),
        colmin,
        rowmax,
        colargmin: (0..u.cols()).filter(|&j| cs[j] == colmin).collect(),
        rowargmax: (0..u.rows()).filter(|&i| rs[i] == rowmax).collect(),
    }
}

pub fn is_row_balanced(u: &GameMatrix) -> bool {
    let rs = u.row_sums();
    rs.iter().all(|&s| s == rs[0])
}

pub fn is_col_balanced(u: &GameMatrix) -> bool {
    let cs = u.col_sums();
    cs.iter().all(|&s| s == cs[0])
}

pub fn is_balanced(u: &GameMatrix) -> bool {
    is_row_balanced(u) && is_col_balanced(u)
}

fn check_side(u: &GameMatrix, s: &MixedStrategy, side: Side) -> Result<(), MatrixError> {
    let expected = match side {
        Side::Row => u.rows(),
        Side::Column => u.cols(),
    };
    if s.side() != side || s.len() != expected {
        return Err(MatrixError::Dimension(format!(
            "{:?} strategy of length {} against a {}x{} matrix",
            s.side(),
            s.len(),
            u.rows(),
            u.cols()
        )));
    }
    Ok(())
}

/// `U(μ, j)` for every column `j`.
pub fn column_payoffs(u: &GameMatrix, mu: &MixedStrategy) -> Result<Vec<Rational>, MatrixError> {
    check_side(u, mu, Side::Row)?;
    let (numers, denom) = mu.scaled();
    let support: Vec<usize> = mu.support();
    let mut sums = vec![BigInt::zero(); u.cols()];
    for &i in &support {
        for (s, &v) in sums.iter_mut().zip(u.row(i)) {
            if v == 1 {
                *s += &numers[i];
            }
        }
    }
    Ok(sums
        .into_iter()
        .map(|s| Rational::new(s, denom.clone()))
        .collect())
}

/// `U(i, ν)` for every row `i`.
pub fn row_payoffs(u: &GameMatrix, nu: &MixedStrategy) -> Result<Vec<Rational>, MatrixError> {
    check_side(u, nu, Side::Column)?;
    let (numers, denom) = nu.scaled();
    let support = nu.support();
    Ok((0..u.rows())
        .map(|i| {
            let row = u.row(i);
            let s: BigInt = support
                .iter()
                .filter(|&&j| row[j] == 1)
                .map(|&j| &numers[j])
                .sum();
            Rational::new(s, denom.clone())
        })
        .collect())
}

/// `U(μ, ν) = Σ_i Σ_j μ_i ν_j u(i, j)`.
pub fn expected_utility(
    u: &GameMatrix,
    mu: &MixedStrategy,
    nu: &MixedStrategy,
) -> Result<Rational, MatrixError> {
    check_side(u, nu, Side::Column)?;
    let cols = column_payoffs(u, mu)?;
    Ok(cols
        .iter()
        .zip(nu.probs())
        .filter(|(_, p)| !p.is_zero())
        .map(|(c, p)| c * p)
        .sum())
}

/// Abelard's best pure reply to `μ`: `min_j U(μ, j)` and the smallest
/// minimizing column.
pub fn best_pure_response_value(
    u: &GameMatrix,
    mu: &MixedStrategy,
) -> Result<(Rational, usize), MatrixError> {
    let cols = column_payoffs(u, mu)?;
    let mut best = 0;
    for j in 1..cols.len() {
        if cols[j] < cols[best] {
            best = j;
        }
    }
    Ok((cols[best].clone(), best))
}

/// Eloise's best pure reply to `ν`: `max_i U(i, ν)` and the smallest
/// maximizing row.
pub fn best_row_response_value(
    u: &GameMatrix,
    nu: &MixedStrategy,
) -> Result<(Rational, usize), MatrixError> {
    let rows = row_payoffs(u, nu)?;
    let mut best = 0;
    for i in 1..rows.len() {
        if rows[i] > rows[best] {
            best = i;
        }
    }
    Ok((rows[best].clone(), best))
}

/// The rows `rows` of `u` in original order, all columns kept.
pub fn row_submatrix(u: &GameMatrix, rows: &BTreeSet<usize>) -> Result<GameMatrix, MatrixError> {
    if rows.is_empty() {
        return Err(MatrixError::EmptySelection);
    }
    if let Some(&r) = rows.iter().find(|&&r| r >= u.rows()) {
        return Err(MatrixError::RowOutOfRange(r));
    }
    let mut data = Vec::with_capacity(rows.len() * u.cols());
    for &r in rows {
        data.extend_from_slice(u.row(r));
    }
    GameMatrix::new(rows.len(), u.cols(), data)
}

/// Result of [`reduce`]: the reduced game plus, for each kept row/column,
/// its index in the original matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub matrix: GameMatrix,
    pub row_map: Vec<usize>,
    pub col_map: Vec<usize>,
}

/// 0/1 vector packed into machine words for fast dominance tests.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_iter(len: usize, it: impl Iterator<Item = u8>) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for (k, v) in it.enumerate() {
            if v == 1 {
                words[k / 64] |= 1 << (k % 64);
            }
        }
        Bits(words)
    }

    fn le(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// Drop duplicates (smallest index survives), then every vector that is
/// dominated by another surviving one. `dominated(a, b)` says `a` may go
/// because of `b`.
fn prune(vectors: &[Bits], alive: &mut [bool], dominated: impl Fn(&Bits, &Bits) -> bool) -> bool {
    let mut changed = false;
    let mut seen: HashMap<&Bits, usize> = HashMap::new();
    for k in 0..vectors.len() {
        if alive[k] && seen.insert(&vectors[k], k).is_some() {
            alive[k] = false;
            changed = true;
        }
    }
    for k in 0..vectors.len() {
        if !alive[k] {
            continue;
        }
        let beaten = (0..vectors.len())
            .any(|o| o != k && alive[o] && dominated(&vectors[k], &vectors[o]));
        if beaten {
            alive[k] = false;
            changed = true;
        }
    }
    changed
}

/// Iterated removal of duplicate and weakly dominated strategies: rows
/// first, then columns, to a fixpoint. The value of the game is unchanged.
pub fn reduce(u: &GameMatrix) -> Reduction {
    let mut row_alive = vec![true; u.rows()];
    let mut col_alive = vec![true; u.cols()];
    loop {
        let live_cols: Vec<usize> = (0..u.cols()).filter(|&j| col_alive[j]).collect();
        let row_vecs: Vec<Bits> = (0..u.rows())
            .map(|i| Bits::from_iter(live_cols.len(), live_cols.iter().map(|&j| u.get(i, j))))
            .collect();
        // row r goes when some other row pays Eloise at least as much everywhere
        let rows_changed = prune(&row_vecs, &mut row_alive, |a, b| a.le(b));

        let live_rows: Vec<usize> = (0..u.rows()).filter(|&i| row_alive[i]).collect();
        let col_vecs: Vec<Bits> = (0..u.cols())
            .map(|j| Bits::from_iter(live_rows.len(), live_rows.iter().map(|&i| u.get(i, j))))
            .collect();
        // column c goes when some other column pays Eloise at most as much
        let cols_changed = prune(&col_vecs, &mut col_alive, |a, b| b.le(a));

        if !rows_changed && !cols_changed {
            break;
        }
    }
    let row_map: Vec<usize> = (0..u.rows()).filter(|&i| row_alive[i]).collect();
    let col_map: Vec<usize> = (0..u.cols()).filter(|&j| col_alive[j]).collect();
    let mut data = Vec::with_capacity(row_map.len() * col_map.len());
    for &i in &row_map {
        for &j in &col_map {
            data.push(u.get(i, j));
        }
    }
    Reduction {
        matrix: GameMatrix::new(row_map.len(), col_map.len(), data).expect("reduction keeps a row and a column"),
        row_map,
        col_map,
    }
}

/// Indices of the first occurrence of each distinct row and column, and for
/// every original row/column the index of its representative.
pub(crate) struct Distinct {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub matrix: GameMatrix,
}

pub(crate) fn distinct(u: &GameMatrix) -> Distinct {
    let mut seen: HashMap<&[u8], ()> = HashMap::new();
    let rows: Vec<usize> = (0..u.rows())
        .filter(|&i| seen.insert(u.row(i), ()).is_none())
        .collect();
    let t = u.transpose();
    let mut seen: HashMap<&[u8], ()> = HashMap::new();
    let cols: Vec<usize> = (0..t.rows())
        .filter(|&j| seen.insert(t.row(j), ()).is_none())
        .collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &j in &cols {
            data.push(u.get(i, j));
        }
    }
    Distinct {
        matrix: GameMatrix::new(rows.len(), cols.len(), data).expect("nonempty"),
        rows,
        cols,
    }
}
