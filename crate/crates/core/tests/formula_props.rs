mod common;

use std::collections::{BTreeMap, BTreeSet};

use ifgame::apps::{birthday_sentence, hash_structure, hashing_sentence};
use ifgame::formula::{parse, validate, Formula, QuantKind, Term, Vocabulary};
use ifgame::structure::{tuples, Assignment, Structure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn vocab() -> Vocabulary {
    Vocabulary::new(
        vec![("P".into(), 1), ("R".into(), 2), ("Edge".into(), 2)],
        vec![("g".into(), 1), ("h".into(), 2), ("+".into(), 2)],
    )
    .unwrap()
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    fresh: usize,
}

impl Gen<'_> {
    fn term(&mut self, vars: &[String], depth: usize) -> Term {
        let v = Term::var(vars.choose(self.rng).unwrap().clone());
        if depth == 0 {
            return v;
        }
        match self.rng.gen_range(0..5) {
            0 => Term::app("g", vec![self.term(vars, depth - 1)]),
            1 => Term::app("h", vec![self.term(vars, depth - 1), self.term(vars, depth - 1)]),
            2 => Term::plus(self.term(vars, depth - 1), self.term(vars, depth - 1)),
            _ => v,
        }
    }

    fn atom(&mut self, vars: &[String]) -> Formula {
        let neg = self.rng.gen_bool(0.4);
        let f = match self.rng.gen_range(0..4) {
            0 => Formula::atom("P", vec![self.term(vars, 2)]),
            1 => Formula::atom("R", vec![self.term(vars, 1), self.term(vars, 1)]),
            2 => Formula::atom("Edge", vec![self.term(vars, 1), self.term(vars, 1)]),
            _ => Formula::eq(self.term(vars, 2), self.term(vars, 2)),
        };
        if !neg {
            return f;
        }
        match f {
            Formula::Atom { rel, args, .. } => Formula::not_atom(rel, args),
            Formula::Equals { lhs, rhs, .. } => Formula::neq(lhs, rhs),
            _ => unreachable!(),
        }
    }

    fn quant(&mut self, vars: &mut Vec<String>, ids: &[String], must_slash: Option<&str>, depth: usize) -> Formula {
        let kind = if self.rng.gen_bool(0.5) {
            QuantKind::Forall
        } else {
            QuantKind::Exists
        };
        let name = format!("v{}", self.fresh);
        self.fresh += 1;
        let mut slash: BTreeSet<String> = ids
            .iter()
            .filter(|_| self.rng.gen_bool(0.3))
            .cloned()
            .collect();
        if let Some(i) = must_slash {
            slash.insert(i.to_string());
        }
        vars.push(name.clone());
        let mut ids2 = ids.to_vec();
        ids2.push(name.clone());
        let body = self.formula(vars, &ids2, depth.saturating_sub(1));
        vars.pop();
        Formula::quant(kind, name, slash, body)
    }

    /// `vars` are term variables in scope, `ids` additionally the choice
    /// variables (allowed in slash sets).
    fn formula(&mut self, vars: &mut Vec<String>, ids: &[String], depth: usize) -> Formula {
        if vars.is_empty() {
            return self.quant(vars, ids, None, depth);
        }
        if depth == 0 {
            return self.atom(vars);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => self.quant(vars, ids, None, depth),
            3 | 4 => {
                let k = self.rng.gen_range(2..=3);
                let bs = (0..k).map(|_| self.formula(vars, ids, depth - 1)).collect();
                if self.rng.gen_bool(0.5) {
                    Formula::and(bs)
                } else {
                    Formula::or(bs)
                }
            }
            5 => {
                // choice form: branches share one skeleton, leaves vary
                let i = format!("i{}", self.fresh);
                self.fresh += 1;
                let mut ids2 = ids.to_vec();
                ids2.push(i.clone());
                let first = self.quant(vars, &ids2, Some(&i), depth - 1);
                let k = self.rng.gen_range(1..=3);
                let mut bs = vec![first.clone()];
                for _ in 1..k {
                    bs.push(self.reshuffle_leaves(&first, vars));
                }
                Formula::choice(i, bs)
            }
            _ => self.atom(vars),
        }
    }

    fn reshuffle_leaves(&mut self, f: &Formula, vars: &mut Vec<String>) -> Formula {
        match f {
            Formula::Atom { .. } | Formula::Equals { .. } => self.atom(vars),
            Formula::Connective { kind, choice_var, branches } => Formula::Connective {
                kind: *kind,
                choice_var: choice_var.clone(),
                branches: branches.iter().map(|b| self.reshuffle_leaves(b, vars)).collect(),
            },
            Formula::Quant { kind, var, slash, body } => {
                vars.push(var.clone());
                let body = self.reshuffle_leaves(body, vars);
                vars.pop();
                Formula::Quant {
                    kind: *kind,
                    var: var.clone(),
                    slash: slash.clone(),
                    body: Box::new(body),
                }
            }
        }
    }
}

fn random_sentence(seed: u64) -> Formula {
    let mut rng = common::rng(seed);
    let depth = rng.gen_range(1..=5);
    let mut g = Gen { rng: &mut rng, fresh: 0 };
    g.formula(&mut Vec::new(), &[], depth)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let f = random_sentence(seed);
        let v = vocab();
        prop_assert_eq!(validate(&f, &v), vec![]);
        let text = f.to_string();
        let back = parse(&text, &v);
        prop_assert_eq!(back.as_ref().ok(), Some(&f), "text: {}", text);
    }
}

#[test]
fn generators_round_trip() {
    let s = ifgame::apps::cyclic_structure(3).unwrap();
    for m in 2..5 {
        let f = birthday_sentence(m).unwrap();
        assert_eq!(parse(&f.to_string(), &s.vocabulary()).unwrap(), f);
    }
    let (s, spec) = hash_structure(3, 2).unwrap();
    let f = hashing_sentence(&spec);
    assert_eq!(parse(&f.to_string(), &s.vocabulary()).unwrap(), f);
}

fn random_structure(rng: &mut ChaCha8Rng) -> Structure {
    let n = rng.gen_range(1..=4);
    let mut s = Structure::new(n).unwrap();
    for (sym, arity) in [("P", 1), ("R", 2), ("Edge", 2)] {
        let ts: Vec<Vec<usize>> = tuples(n, arity).filter(|_| rng.gen_bool(0.5)).collect();
        s.add_relation(sym, arity, ts).unwrap();
    }
    for (sym, arity) in [("g", 1), ("h", 2), ("+", 2)] {
        let table = tuples(n, arity).map(|_| rng.gen_range(0..n)).collect();
        s.add_function_table(sym, arity, table).unwrap();
    }
    s
}

fn qf(g: &mut Gen<'_>, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || g.rng.gen_bool(0.3) {
        return g.atom(vars);
    }
    let k = g.rng.gen_range(2..=3);
    let bs = (0..k).map(|_| qf(g, vars, depth - 1)).collect();
    if g.rng.gen_bool(0.5) {
        Formula::and(bs)
    } else {
        Formula::or(bs)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn holds_qf_agrees_with_direct_evaluation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = random_structure(&mut rng);
        let vars: Vec<String> = (0..3).map(|k| format!("v{k}")).collect();
        let values: Vec<usize> = vars.iter().map(|_| rng.gen_range(0..s.size())).collect();
        let mut g = Gen { rng: &mut rng, fresh: 0 };
        let f = qf(&mut g, &vars, 3);
        let mut a = Assignment::new();
        let mut env = BTreeMap::new();
        for (v, &d) in vars.iter().zip(&values) {
            a.set(v.clone(), d);
            env.insert(v.clone(), d);
        }
        prop_assert_eq!(s.holds_qf(&a, &f).unwrap(), common::tarski(&s, &mut env, &f));
    }
}
