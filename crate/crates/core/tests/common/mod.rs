//! Generators and oracles shared by the integration suites. The oracles
//! compute matrices and truth values directly, without the game compiler.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ifgame::formula::{ConnectiveKind, Formula, QuantKind, Term};
use ifgame::matrix::GameMatrix;
use ifgame::structure::{tuples, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 0/1 matrix with dimensions in `1..=max_rows` × `1..=max_cols`
/// and a random density per matrix.
pub fn random_matrix(rng: &mut ChaCha8Rng, max_rows: usize, max_cols: usize) -> GameMatrix {
    let m = rng.gen_range(1..=max_rows);
    let n = rng.gen_range(1..=max_cols);
    let p: f64 = rng.gen_range(0.1..0.9);
    let data = (0..m * n).map(|_| rng.gen_bool(p) as u8).collect();
    GameMatrix::new(m, n, data).unwrap()
}

/// `n × n` circulant: row `i` is the first row shifted right by `i`.
pub fn circulant(first: &[u8]) -> GameMatrix {
    let n = first.len();
    let data = (0..n)
        .flat_map(|i| (0..n).map(move |j| first[(j + n - i) % n]))
        .collect();
    GameMatrix::new(n, n, data).unwrap()
}

pub fn random_circulant(rng: &mut ChaCha8Rng, max_n: usize) -> GameMatrix {
    let n = rng.gen_range(1..=max_n);
    let first: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.5) as u8).collect();
    circulant(&first)
}

/// Birthday game written out by hand: rows are Eloise's `(x_m..x_{2m−1})`,
/// columns Abelard's `(x_0..x_{m−1})`, both lexicographic; Eloise wins iff
/// two of the `b_i = x_i + x_{i+m} mod n` coincide.
pub fn birthday_direct(n: usize, m: usize) -> GameMatrix {
    let rows: Vec<Vec<usize>> = tuples(n, m).collect();
    let cols: Vec<Vec<usize>> = tuples(n, m).collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for e in &rows {
        for a in &cols {
            let b: Vec<usize> = (0..m).map(|i| (a[i] + e[i]) % n).collect();
            let dup = (0..m).any(|i| (i + 1..m).any(|j| b[i] == b[j]));
            data.push(dup as u8);
        }
    }
    GameMatrix::new(rows.len(), cols.len(), data).unwrap()
}

/// Hashing game written out by hand over the universe `keys + values`:
/// rows are hash tables, columns Abelard's `(x, y-table over x)` in
/// lexicographic order. Eloise loses only on two distinct keys that
/// collide.
pub fn hashing_direct(keys: usize, values: usize) -> GameMatrix {
    let size = keys + values;
    let tables: Vec<Vec<usize>> = tuples(values, keys).collect();
    let cols: Vec<(usize, usize)> = tuples(size, size + 1)
        .map(|t| {
            let x = t[0];
            (x, t[1 + x])
        })
        .collect();
    let mut data = Vec::with_capacity(tables.len() * cols.len());
    for t in &tables {
        for &(x, y) in &cols {
            let lose = x < keys && y < keys && x != y && t[x] == t[y];
            data.push(!lose as u8);
        }
    }
    GameMatrix::new(tables.len(), cols.len(), data).unwrap()
}

fn term(s: &Structure, env: &BTreeMap<String, usize>, t: &Term) -> usize {
    match t {
        Term::Var(v) => env[v],
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term(s, env, a)).collect();
            s.apply(f, &vals).unwrap()
        }
    }
}

/// Classical (Tarskian) truth, ignoring slash sets; choice connectives are
/// read as ordinary connectives. Agrees with the existence of a winning
/// strategy whenever the sentence has perfect information.
pub fn tarski(s: &Structure, env: &mut BTreeMap<String, usize>, f: &Formula) -> bool {
    match f {
        Formula::Atom { rel, args, negated } => {
            let vals: Vec<usize> = args.iter().map(|a| term(s, env, a)).collect();
            s.holds(rel, &vals).unwrap() != *negated
        }
        Formula::Equals { lhs, rhs, negated } => {
            (term(s, env, lhs) == term(s, env, rhs)) != *negated
        }
        Formula::Connective { kind, branches, .. } => {
            let mut it = branches.iter().map(|b| tarski(s, env, b)).collect::<Vec<_>>().into_iter();
            match kind {
                ConnectiveKind::And => it.all(|v| v),
                ConnectiveKind::Or => it.any(|v| v),
            }
        }
        Formula::Quant { kind, var, body, .. } => {
            let mut results = Vec::with_capacity(s.size());
            for d in 0..s.size() {
                let old = env.insert(var.clone(), d);
                results.push(tarski(s, env, body));
                match old {
                    Some(o) => env.insert(var.clone(), o),
                    None => env.remove(var),
                };
            }
            match kind {
                QuantKind::Forall => results.iter().all(|&v| v),
                QuantKind::Exists => results.iter().any(|&v| v),
            }
        }
    }
}
