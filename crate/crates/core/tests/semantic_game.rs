mod common;

use std::collections::BTreeMap;

use ifgame::apps::{birthday_sentence, cyclic_structure, hash_structure, hashing_sentence};
use ifgame::formula::{parse, Formula, QuantKind, Term};
use ifgame::game::{build_matrix, Game, GameError, Player, DEFAULT_STRATEGY_BUDGET};
use ifgame::structure::{tuples, Structure};
use ifgame::value::solve_value;
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SMALL: u64 = 1 << 12;

fn structure(rng: &mut ChaCha8Rng, n: usize) -> Structure {
    let mut s = Structure::new(n).unwrap();
    let p: Vec<Vec<usize>> = tuples(n, 1).filter(|_| rng.gen_bool(0.5)).collect();
    let r: Vec<Vec<usize>> = tuples(n, 2).filter(|_| rng.gen_bool(0.5)).collect();
    s.add_relation("P", 1, p).unwrap();
    s.add_relation("R", 2, r).unwrap();
    s
}

/// Random sentence over `P/1`, `R/2`; `slash` is the chance that a bound
/// variable is hidden from a quantifier.
fn sentence(rng: &mut ChaCha8Rng, vars: &mut Vec<String>, depth: usize, slash: f64) -> Formula {
    let pick = |rng: &mut ChaCha8Rng, vars: &[String]| Term::var(vars[rng.gen_range(0..vars.len())].clone());
    if vars.is_empty() || (depth > 0 && rng.gen_bool(0.45)) {
        let name = format!("v{}", vars.len());
        let hidden: Vec<String> = vars.iter().filter(|_| rng.gen_bool(slash)).cloned().collect();
        let kind = if rng.gen_bool(0.5) { QuantKind::Forall } else { QuantKind::Exists };
        vars.push(name.clone());
        let body = sentence(rng, vars, depth.saturating_sub(1), slash);
        vars.pop();
        return Formula::quant(kind, name, hidden, body);
    }
    if depth > 0 && rng.gen_bool(0.5) {
        let bs = (0..2).map(|_| sentence(rng, &mut vars.clone(), depth - 1, slash)).collect();
        return if rng.gen_bool(0.5) { Formula::and(bs) } else { Formula::or(bs) };
    }
    let f = match rng.gen_range(0..3) {
        0 => Formula::atom("P", vec![pick(rng, vars)]),
        1 => Formula::atom("R", vec![pick(rng, vars), pick(rng, vars)]),
        _ => Formula::eq(pick(rng, vars), pick(rng, vars)),
    };
    if rng.gen_bool(0.3) {
        match f {
            Formula::Atom { rel, args, .. } => Formula::not_atom(rel, args),
            Formula::Equals { lhs, rhs, .. } => Formula::neq(lhs, rhs),
            _ => unreachable!(),
        }
    } else {
        f
    }
}

#[test]
fn collapse_preserves_value_on_fixtures() {
    let plain = Structure::new(2).unwrap();
    let mut fixtures: Vec<(Structure, Formula)> = vec![
        (plain.clone(), parse("Ax (Ey/x) x = y", &plain.vocabulary()).unwrap()),
        (plain.clone(), parse("Ax (Ey/x) (x = y | ~x = y)", &plain.vocabulary()).unwrap()),
        (plain.clone(), parse("Ax (Ey/x) (x = y & (Ez (z = x | z = y)))", &plain.vocabulary()).unwrap()),
        (cyclic_structure(2).unwrap(), birthday_sentence(2).unwrap()),
    ];
    let (hs, spec) = hash_structure(2, 1).unwrap();
    fixtures.push((hs.clone(), hashing_sentence(&spec)));
    for (s, f) in &fixtures {
        let on = build_matrix(s, f, true, DEFAULT_STRATEGY_BUDGET).unwrap();
        let off = build_matrix(s, f, false, DEFAULT_STRATEGY_BUDGET).unwrap();
        assert_eq!(solve_value(&on.matrix).value, solve_value(&off.matrix).value, "{f}");
    }
}

#[test]
fn collapse_preserves_value_on_random_sentences() {
    let mut rng = common::rng(7);
    let mut checked = 0;
    for _ in 0..400 {
        let s = structure(&mut rng, 2);
        let f = sentence(&mut rng, &mut Vec::new(), 3, 0.4);
        let (on, off) = match (build_matrix(&s, &f, true, SMALL), build_matrix(&s, &f, false, SMALL)) {
            (Ok(a), Ok(b)) => (a, b),
            (_, Err(GameError::BudgetExceeded { .. })) => continue,
            (a, b) => panic!("{f}: {:?} {:?}", a.err(), b.err()),
        };
        assert_eq!(solve_value(&on.matrix).value, solve_value(&off.matrix).value, "{f}");
        checked += 1;
    }
    assert!(checked >= 200, "only {checked} sentences fit the budget");
}

/// Branch counts of choice variables, for visible ranges.
fn choice_ranges(f: &Formula, out: &mut BTreeMap<String, usize>) {
    if let Formula::Connective { choice_var: Some(c), branches, .. } = f {
        out.insert(c.clone(), branches.len());
    }
    for c in f.children() {
        choice_ranges(c, out);
    }
}

#[test]
fn strategy_counts_match_the_product_formula() {
    let mut rng = common::rng(11);
    let mut cases: Vec<(Structure, Formula)> = Vec::new();
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let s = structure(&mut rng, n);
        let f = sentence(&mut rng, &mut Vec::new(), 3, 0.4);
        cases.push((s, f));
    }
    let (hs, spec) = hash_structure(2, 2).unwrap();
    cases.push((hs, hashing_sentence(&spec)));
    for (s, f) in &cases {
        let g = Game::new(s, f, false).unwrap();
        let mut ranges = BTreeMap::new();
        choice_ranges(f, &mut ranges);
        for p in [Player::Eloise, Player::Abelard] {
            let mut expect = BigUint::from(1u32);
            for d in g.decision_points().iter().filter(|d| d.owner == p) {
                let cells: usize = d
                    .visible
                    .iter()
                    .map(|v| ranges.get(v).copied().unwrap_or(s.size()))
                    .product();
                expect *= BigUint::from(d.options).pow(cells as u32);
            }
            assert_eq!(g.strategy_count(p), expect, "{f}");
            if expect <= BigUint::from(SMALL) {
                assert_eq!(
                    BigUint::from(g.enumerate_strategies(p, SMALL).unwrap().len()),
                    expect
                );
            }
        }
    }
}

#[test]
fn perfect_information_is_classical() {
    let mut rng = common::rng(23);
    let mut checked = 0;
    for _ in 0..600 {
        let n = rng.gen_range(1..=3);
        let s = structure(&mut rng, n);
        let f = sentence(&mut rng, &mut Vec::new(), 3, 0.0);
        let collapse = rng.gen_bool(0.5);
        let r = match build_matrix(&s, &f, collapse, SMALL) {
            Ok(r) => r,
            Err(GameError::BudgetExceeded { .. }) => continue,
            Err(e) => panic!("{f}: {e}"),
        };
        let truth = common::tarski(&s, &mut BTreeMap::new(), &f);
        assert_eq!(r.matrix.has_all_ones_row().is_some(), truth, "{f}");
        assert_eq!(r.matrix.has_all_zeros_col().is_some(), !truth, "{f}");
        checked += 1;
    }
    assert!(checked >= 300, "only {checked} sentences fit the budget");
}

#[test]
fn matrices_are_reproducible() {
    let s = cyclic_structure(3).unwrap();
    let f = birthday_sentence(2).unwrap();
    let a = build_matrix(&s, &f, true, SMALL).unwrap();
    let b = build_matrix(&s, &f, true, SMALL).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.matrix, common::birthday_direct(3, 2));
}
