mod common;

use ifgame::apps::*;
use ifgame::formula::{parse, validate};
use ifgame::game::{build_matrix, GameError, DEFAULT_STRATEGY_BUDGET};
use ifgame::rational::{int, ratio};
use ifgame::structure::tuples;
use ifgame::value::{certifies, solve_value};

use common::{birthday_direct, hashing_direct};

#[test]
fn matching_pennies_is_one_over_n() {
    for n in 1..=8 {
        let (f, s) = matching_pennies(n).unwrap();
        assert_eq!(f, parse("Ax (Ey/x) x = y", &s.vocabulary()).unwrap());
        let r = build_matrix(&s, &f, true, DEFAULT_STRATEGY_BUDGET).unwrap();
        assert_eq!(solve_value(&r.matrix).value, ratio(1, n as i64));
    }
}

#[test]
fn birthday_pipeline_matches_direct_oracle_and_duplicate_probability() {
    for (n, m) in [(2, 2), (3, 2), (4, 2), (3, 3)] {
        let s = cyclic_structure(n).unwrap();
        let f = birthday_sentence(m).unwrap();
        assert!(validate(&f, &s.vocabulary()).is_empty());
        let built = build_matrix(&s, &f, true, DEFAULT_STRATEGY_BUDGET).unwrap();
        let direct = birthday_direct(n, m);
        assert_eq!(built.matrix, direct, "(n, m) = ({n}, {m})");
        let v = solve_value(&built.matrix);
        assert!(certifies(&built.matrix, &v));
        let (distinct, dup) = birthday_closed_form(n, m);
        assert_eq!(v.value, dup, "(n, m) = ({n}, {m})");
        if distinct != dup {
            assert_ne!(v.value, distinct);
        }
    }
}

#[test]
fn birthday_collapse_equivalence() {
    // ψ_3 has three disjuncts, so without collapse Eloise also picks one
    let s = cyclic_structure(2).unwrap();
    let f = birthday_sentence(3).unwrap();
    let on = build_matrix(&s, &f, true, DEFAULT_STRATEGY_BUDGET).unwrap();
    let off = build_matrix(&s, &f, false, DEFAULT_STRATEGY_BUDGET);
    match off {
        Ok(off) => assert_eq!(solve_value(&on.matrix).value, solve_value(&off.matrix).value),
        Err(e) => assert!(matches!(e, GameError::BudgetExceeded { .. })),
    }
}

#[test]
fn generators_validate() {
    for m in 2..6 {
        let s = cyclic_structure(5).unwrap();
        assert!(validate(&birthday_sentence(m).unwrap(), &s.vocabulary()).is_empty());
    }
    for (k, v) in [(1, 1), (2, 2), (3, 2), (2, 3), (4, 3)] {
        let (s, spec) = hash_structure(k, v).unwrap();
        assert!(validate(&hashing_sentence(&spec), &s.vocabulary()).is_empty());
    }
}

#[test]
fn hashing_equilibrium_on_every_buildable_spec() {
    // the full strategic game fits the default budget iff keys + values ≤ 6
    for keys in 2..=5 {
        for values in 1..=4 {
            let (_, spec) = match hash_structure(keys, values) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if spec.functions.len() > 64 {
                continue;
            }
            match hashing_equilibrium(&spec, DEFAULT_STRATEGY_BUDGET) {
                Ok(h) => {
                    assert!(keys + values <= 6);
                    assert!(h.verified, "({keys}, {values})");
                    assert_eq!(h.value, solve_value(&h.matrix).value, "({keys}, {values})");
                    assert_eq!(h.matrix, hashing_direct(keys, values));
                    // closed form: 1 − collisions(d-table) / (n(n−1))
                    let t = &spec.functions[*minimal_degree_indices(&spec).iter().next().unwrap()];
                    let expect = int(1) - ratio(colliding_pairs(t) as i64, (keys * (keys - 1)) as i64);
                    assert_eq!(h.value, expect, "({keys}, {values})");
                }
                Err(AppError::Game(GameError::BudgetExceeded { .. })) => assert!(keys + values > 6),
                Err(e) => panic!("({keys}, {values}): {e}"),
            }
        }
    }
}

#[test]
fn lambda_reduces_collisions() {
    for keys in 1..=8 {
        for values in 1..=8 {
            if (values as u64).pow(keys as u32) > 256 {
                continue;
            }
            let d = minimal_degree(keys, values);
            for t in tuples(values, keys) {
                let deg = function_degree(&t, values).degree;
                let next = lambda_step(&t, values);
                if deg > 1 {
                    assert!(colliding_pairs(&next) < colliding_pairs(&t), "{t:?}");
                } else {
                    assert_eq!(next, t);
                }
                let mut cur = t.clone();
                while function_degree(&cur, values).degree > 1 {
                    cur = lambda_step(&cur, values);
                }
                assert_eq!(function_degree(&cur, values).degree, d, "{t:?}");
            }
        }
    }
}

#[test]
fn minimal_degree_tables_collide_equally() {
    for keys in 1..=8 {
        for values in 1..=8 {
            if (values as u64).pow(keys as u32) > 256 {
                continue;
            }
            let (_, spec) = hash_structure(keys, values).unwrap();
            let counts: std::collections::BTreeSet<usize> = minimal_degree_indices(&spec)
                .iter()
                .map(|&i| colliding_pairs(&spec.functions[i]))
                .collect();
            assert_eq!(counts.len(), 1, "({keys}, {values})");
            // and no table collides less
            let min = spec.functions.iter().map(|t| colliding_pairs(t)).min().unwrap();
            assert_eq!(counts.into_iter().next().unwrap(), min);
        }
    }
}
