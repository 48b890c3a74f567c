//! Generators and closed forms for three case studies: Matching Pennies,
//! the birthday game on cyclic addition, and universal hashing.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::formula::{Formula, QuantKind, Term};
use crate::game::{Game, GameError, Player};
use crate::matrix::{expected_utility, GameMatrix, MixedStrategy, Side};
use crate::rational::Rational;
use crate::structure::Structure;
use crate::value::verify_equilibrium;

/// Largest universe `keys + values` accepted by [`hash_structure`].
pub const HASH_UNIVERSE_LIMIT: usize = 64;
/// Largest number of hash tables `values^keys` accepted by [`hash_structure`].
pub const HASH_TABLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AppError {
    #[error("{what} must be at least {min}, got {found}")]
    TooSmall {
        what: &'static str,
        min: usize,
        found: usize,
    },
    #[error("{what} is {found}, the limit is {limit}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        found: usize,
    },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn at_least(what: &'static str, min: usize, found: usize) -> Result<(), AppError> {
    if found < min {
        Err(AppError::TooSmall { what, min, found })
    } else {
        Ok(())
    }
}

/// `∀x (∃y/x) x = y` on a bare `n`-element structure.
pub fn matching_pennies(n: usize) -> Result<(Formula, Structure), AppError> {
    at_least("universe size", 1, n)?;
    let f = Formula::forall(
        "x",
        Formula::quant(
            QuantKind::Exists,
            "y",
            ["x"],
            Formula::eq(Term::var("x"), Term::var("y")),
        ),
    );
    Ok((f, Structure::new(n).expect("n ≥ 1")))
}

fn xv(k: usize) -> String {
    format!("x{k}")
}

/// `∀x_0 (∀x_1/X_1) … (∃x_m/X_m) … (∃x_{2m−1}/X_{2m−1}) ψ_m` where
/// `X_k = {x_0, …, x_{k−1}}` and `ψ_m` is the flat disjunction of
/// `x_i + x_{i+m} = x_j + x_{j+m}` over `i < j < m`.
pub fn birthday_sentence(m: usize) -> Result<Formula, AppError> {
    at_least("number of people", 2, m)?;
    let b = |i: usize| Term::plus(Term::var(xv(i)), Term::var(xv(i + m)));
    let mut disjuncts = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            disjuncts.push(Formula::eq(b(i), b(j)));
        }
    }
    let mut f = if disjuncts.len() == 1 {
        disjuncts.pop().expect("one disjunct")
    } else {
        Formula::or(disjuncts)
    };
    for k in (0..2 * m).rev() {
        let kind = if k < m {
            QuantKind::Forall
        } else {
            QuantKind::Exists
        };
        f = Formula::quant(kind, xv(k), (0..k).map(xv), f);
    }
    Ok(f)
}

/// Universe `0..n` with `+` interpreted as addition mod `n`.
pub fn cyclic_structure(n: usize) -> Result<Structure, AppError> {
    at_least("universe size", 1, n)?;
    let mut s = Structure::new(n).expect("n ≥ 1");
    s.add_function("+", 2, |a| (a[0] + a[1]) % n)
        .expect("fresh symbol");
    Ok(s)
}

/// `(n!/(n^m (n−m)!), 1 − n!/(n^m (n−m)!))`: the chance that `m` uniform
/// draws from `n` values are all distinct, and that some two coincide.
pub fn birthday_closed_form(n: usize, m: usize) -> (Rational, Rational) {
    let distinct = if m > n {
        Rational::zero()
    } else {
        (0..m).fold(Rational::one(), |acc, k| {
            acc * Rational::new(BigInt::from(n - k), BigInt::from(n))
        })
    };
    let dup = Rational::one() - &distinct;
    (distinct, dup)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashStructureSpec {
    pub key_count: usize,
    pub value_count: usize,
    /// All `value_count^key_count` tables from key index to value index,
    /// in lexicographic order.
    pub functions: Vec<Vec<usize>>,
}

impl HashStructureSpec {
    /// Universe element of key `k`.
    pub fn key(&self, k: usize) -> usize {
        k
    }

    /// Universe element of value `v`.
    pub fn value(&self, v: usize) -> usize {
        self.key_count + v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFunctionAnalysis {
    /// Pre-image size of every value, by value index; empty pre-images
    /// count as 0.
    pub preimage_sizes: Vec<usize>,
    pub degree: usize,
}

pub fn hash_function_symbol(index: usize) -> String {
    format!("f{index}")
}

/// Keys are universe elements `0..keys`, values `keys..keys+values`.
/// `U` marks the keys; `f<i>` is the `i`-th table on keys and the identity
/// on values.
pub fn hash_structure(keys: usize, values: usize) -> Result<(Structure, HashStructureSpec), AppError> {
    at_least("key count", 1, keys)?;
    at_least("value count", 1, values)?;
    let size = keys + values;
    if size > HASH_UNIVERSE_LIMIT {
        return Err(AppError::TooLarge {
            what: "hash universe",
            limit: HASH_UNIVERSE_LIMIT,
            found: size,
        });
    }
    let count = (values as u128).checked_pow(keys as u32).unwrap_or(u128::MAX);
    if count > HASH_TABLE_LIMIT as u128 {
        return Err(AppError::TooLarge {
            what: "number of hash tables",
            limit: HASH_TABLE_LIMIT,
            found: count.min(usize::MAX as u128) as usize,
        });
    }
    let functions: Vec<Vec<usize>> = crate::structure::tuples(values, keys).collect();
    let mut s = Structure::new(size).expect("nonempty");
    s.add_relation("U", 1, (0..keys).map(|k| vec![k]))
        .expect("fresh symbol");
    for (i, table) in functions.iter().enumerate() {
        s.add_function(hash_function_symbol(i), 1, |a| {
            if a[0] < keys {
                keys + table[a[0]]
            } else {
                a[0]
            }
        })
        .expect("fresh symbol");
    }
    Ok((
        s,
        HashStructureSpec {
            key_count: keys,
            value_count: values,
            functions,
        },
    ))
}

/// `⋁_i (∀x/i)(∀y/i) (¬U(x) ∨ ¬U(y) ∨ x = y ∨ f_i(x) ≠ f_i(y))`.
pub fn hashing_sentence(spec: &HashStructureSpec) -> Formula {
    let branches = (0..spec.functions.len())
        .map(|i| {
            let f = hash_function_symbol(i);
            let body = Formula::or(vec![
                Formula::not_atom("U", vec![Term::var("x")]),
                Formula::not_atom("U", vec![Term::var("y")]),
                Formula::eq(Term::var("x"), Term::var("y")),
                Formula::neq(
                    Term::app(f.clone(), vec![Term::var("x")]),
                    Term::app(f, vec![Term::var("y")]),
                ),
            ]);
            Formula::quant(
                QuantKind::Forall,
                "x",
                ["i"],
                Formula::quant(QuantKind::Forall, "y", ["i"], body),
            )
        })
        .collect();
    Formula::choice("i", branches)
}

/// Pre-image sizes over `values` values, and their spread.
pub fn function_degree(table: &[usize], values: usize) -> HashFunctionAnalysis {
    let mut sizes = vec![0; values];
    for &v in table {
        sizes[v] += 1;
    }
    let max = sizes.iter().copied().max().unwrap_or(0);
    let min = sizes.iter().copied().min().unwrap_or(0);
    HashFunctionAnalysis {
        preimage_sizes: sizes,
        degree: max - min,
    }
}

/// Ordered pairs of distinct keys with the same image.
pub fn colliding_pairs(table: &[usize]) -> usize {
    let mut n = 0;
    for (a, x) in table.iter().enumerate() {
        for (b, y) in table.iter().enumerate() {
            if a != b && x == y {
                n += 1;
            }
        }
    }
    n
}

/// Moves one key from a largest pre-image to a smallest one; tables of
/// degree ≤ 1 are returned unchanged. Ties go to the smallest value, and
/// the moved key is the smallest key of its pre-image.
pub fn lambda_step(table: &[usize], values: usize) -> Vec<usize> {
    let a = function_degree(table, values);
    if a.degree <= 1 {
        return table.to_vec();
    }
    let max = *a.preimage_sizes.iter().max().expect("values ≥ 1");
    let min = *a.preimage_sizes.iter().min().expect("values ≥ 1");
    let from = a.preimage_sizes.iter().position(|&s| s == max).expect("max exists");
    let to = a.preimage_sizes.iter().position(|&s| s == min).expect("min exists");
    let key = table.iter().position(|&v| v == from).expect("nonempty pre-image");
    let mut out = table.to_vec();
    out[key] = to;
    out
}

/// `min{1, keys mod values}`.
pub fn minimal_degree(keys: usize, values: usize) -> usize {
    (keys % values).min(1)
}

/// Indices of the tables of degree `min{1, n mod m}`.
pub fn minimal_degree_indices(spec: &HashStructureSpec) -> BTreeSet<usize> {
    let d = minimal_degree(spec.key_count, spec.value_count);
    spec.functions
        .iter()
        .enumerate()
        .filter(|(_, t)| function_degree(t, spec.value_count).degree == d)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashingEquilibrium {
    pub matrix: GameMatrix,
    /// Uniform over the minimal-degree tables.
    pub eloise: MixedStrategy,
    /// Uniform over Abelard's pure strategies that pick two distinct keys.
    pub abelard: MixedStrategy,
    pub value: Rational,
    pub verified: bool,
}

/// Builds the hashing game through the general pipeline and checks the
/// uniform pair over minimal-degree tables and distinct key pairs.
pub fn hashing_equilibrium(spec: &HashStructureSpec, budget: u64) -> Result<HashingEquilibrium, AppError> {
    at_least("key count", 2, spec.key_count)?;
    let (s, _) = hash_structure(spec.key_count, spec.value_count)?;
    let f = hashing_sentence(spec);
    let game = Game::new(&s, &f, true)?;
    let built = game.build_matrix(budget)?;
    // Eloise's only move is the branch, so row i is table i
    let eloise = MixedStrategy::uniform_on(
        built.eloise_count,
        minimal_degree_indices(spec),
        Side::Row,
    );
    let keys = spec.key_count;
    let t_star = game
        .enumerate_strategies(Player::Abelard, budget)?
        .into_iter()
        .enumerate()
        .filter(|(_, st)| {
            let x = st.choices[0][0];
            let y = st.choices[1][x];
            x < keys && y < keys && x != y
        })
        .map(|(j, _)| j)
        .collect::<Vec<_>>();
    let abelard = MixedStrategy::uniform_on(built.abelard_count, t_star, Side::Column);
    let matrix = built.matrix;
    let verified = verify_equilibrium(&matrix, &eloise, &abelard).expect("dimensions match");
    let value = expected_utility(&matrix, &eloise, &abelard).expect("dimensions match");
    Ok(HashingEquilibrium {
        matrix,
        eloise,
        abelard,
        value,
        verified,
    })
}
