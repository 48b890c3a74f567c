use std::collections::BTreeSet;
use std::fmt;

use super::{ConnectiveKind, Formula, QuantKind, Term, Vocabulary};

/// A broken well-formedness condition. Violations are data; [`validate`]
/// collects all of them rather than stopping at the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnboundVariable(String),
    ChoiceVarInTerm(String),
    UnboundSlashVariable(String),
    UnknownRelation(String),
    UnknownFunction(String),
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    UnusedChoiceVar(String),
    ReboundVariable(String),
    DegenerateConnective,
    ChoiceBranchShapeMismatch(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnboundVariable(v) => write!(f, "unbound-variable {v}"),
            Violation::ChoiceVarInTerm(v) => write!(f, "choice-variable-in-term {v}"),
            Violation::UnboundSlashVariable(v) => write!(f, "unbound-slash-variable {v}"),
            Violation::UnknownRelation(s) => write!(f, "unknown-relation {s}"),
            Violation::UnknownFunction(s) => write!(f, "unknown-function {s}"),
            Violation::ArityMismatch {
                symbol,
                expected,
                found,
            } => write!(f, "arity-mismatch {symbol} (expected {expected}, found {found})"),
            Violation::UnusedChoiceVar(v) => write!(f, "unused-choice-variable {v}"),
            Violation::ReboundVariable(v) => write!(f, "rebound-variable {v}"),
            Violation::DegenerateConnective => write!(f, "degenerate-connective"),
            Violation::ChoiceBranchShapeMismatch(v) => write!(f, "choice-branch-shape-mismatch {v}"),
        }
    }
}

/// Check every formula invariant and that `f` is a sentence over `vocab`.
/// Returns an empty list exactly when `f` is well formed.
pub fn validate(f: &Formula, vocab: &Vocabulary) -> Vec<Violation> {
    let mut cx = Checker {
        vocab,
        vars: Vec::new(),
        choices: Vec::new(),
        out: Vec::new(),
    };
    cx.formula(f);
    cx.out
}

struct Checker<'a> {
    vocab: &'a Vocabulary,
    vars: Vec<String>,
    choices: Vec<String>,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn is_bound(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name) || self.choices.iter().any(|v| v == name)
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Atom { rel, args, .. } => {
                match self.vocab.relation_arity(rel) {
                    None => self.out.push(Violation::UnknownRelation(rel.clone())),
                    Some(a) if a != args.len() => self.out.push(Violation::ArityMismatch {
                        symbol: rel.clone(),
                        expected: a,
                        found: args.len(),
                    }),
                    Some(_) => {}
                }
                for t in args {
                    self.term(t);
                }
            }
            Formula::Equals { lhs, rhs, .. } => {
                self.term(lhs);
                self.term(rhs);
            }
            Formula::Connective {
                choice_var,
                branches,
                ..
            } => {
                let min = if choice_var.is_some() { 1 } else { 2 };
                if branches.len() < min {
                    self.out.push(Violation::DegenerateConnective);
                }
                if let Some(cv) = choice_var {
                    if self.is_bound(cv) {
                        self.out.push(Violation::ReboundVariable(cv.clone()));
                    }
                    if !branches.iter().any(|b| slashes(b, cv)) {
                        self.out.push(Violation::UnusedChoiceVar(cv.clone()));
                    }
                    if let Some(first) = branches.first() {
                        let shape = Shape::of(first);
                        if branches[1..].iter().any(|b| Shape::of(b) != shape) {
                            self.out.push(Violation::ChoiceBranchShapeMismatch(cv.clone()));
                        }
                    }
                    self.choices.push(cv.clone());
                    for b in branches {
                        self.formula(b);
                    }
                    self.choices.pop();
                } else {
                    for b in branches {
                        self.formula(b);
                    }
                }
            }
            Formula::Quant {
                var, slash, body, ..
            } => {
                for s in slash {
                    if !self.is_bound(s) {
                        self.out.push(Violation::UnboundSlashVariable(s.clone()));
                    }
                }
                if self.is_bound(var) {
                    self.out.push(Violation::ReboundVariable(var.clone()));
                }
                self.vars.push(var.clone());
                self.formula(body);
                self.vars.pop();
            }
        }
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Var(v) => {
                if self.vars.iter().any(|x| x == v) {
                } else if self.choices.iter().any(|x| x == v) {
                    self.out.push(Violation::ChoiceVarInTerm(v.clone()));
                } else {
                    self.out.push(Violation::UnboundVariable(v.clone()));
                }
            }
            Term::App(sym, args) => {
                match self.vocab.function_arity(sym) {
                    None => self.out.push(Violation::UnknownFunction(sym.clone())),
                    Some(a) if a != args.len() => self.out.push(Violation::ArityMismatch {
                        symbol: sym.clone(),
                        expected: a,
                        found: args.len(),
                    }),
                    Some(_) => {}
                }
                for a in args {
                    self.term(a);
                }
            }
        }
    }
}

fn slashes(f: &Formula, name: &str) -> bool {
    match f {
        Formula::Quant { slash, body, .. } => slash.contains(name) || slashes(body, name),
        Formula::Connective { branches, .. } => branches.iter().any(|b| slashes(b, name)),
        _ => false,
    }
}

/// The game-relevant skeleton of a formula: quantifiers and connectives with
/// their binders and slash sets, atoms erased.
#[derive(PartialEq, Eq)]
enum Shape<'a> {
    Leaf,
    Quant(QuantKind, &'a str, &'a BTreeSet<String>, Box<Shape<'a>>),
    Conn(ConnectiveKind, Option<&'a str>, Vec<Shape<'a>>),
}

impl<'a> Shape<'a> {
    fn of(f: &'a Formula) -> Self {
        match f {
            Formula::Atom { .. } | Formula::Equals { .. } => Shape::Leaf,
            Formula::Quant {
                kind,
                var,
                slash,
                body,
            } => Shape::Quant(*kind, var, slash, Box::new(Shape::of(body))),
            Formula::Connective {
                kind,
                choice_var,
                branches,
            } => Shape::Conn(
                *kind,
                choice_var.as_deref(),
                branches.iter().map(Shape::of).collect(),
            ),
        }
    }
}
