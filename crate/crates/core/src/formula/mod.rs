//! Independence-friendly sentences in negation normal form.
//!
//! Quantifiers carry a slash set of identifiers whose values the mover may
//! not consult. A disjunction may bind a *choice variable* naming the index
//! of the branch Eloise picked; later quantifiers can then slash that index,
//! hiding which branch is being played.

mod parse;
mod print;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse, ParseError};
pub use validate::{validate, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    /// `lhs + rhs`, the binary function symbol `+`.
    pub fn plus(lhs: Term, rhs: Term) -> Self {
        Term::App("+".into(), vec![lhs, rhs])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnectiveKind {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom {
        rel: String,
        args: Vec<Term>,
        negated: bool,
    },
    Equals {
        lhs: Term,
        rhs: Term,
        negated: bool,
    },
    Connective {
        kind: ConnectiveKind,
        choice_var: Option<String>,
        branches: Vec<Formula>,
    },
    Quant {
        kind: QuantKind,
        var: String,
        slash: BTreeSet<String>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(rel: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom {
            rel: rel.into(),
            args,
            negated: false,
        }
    }

    pub fn not_atom(rel: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom {
            rel: rel.into(),
            args,
            negated: true,
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::Equals {
            lhs,
            rhs,
            negated: false,
        }
    }

    pub fn neq(lhs: Term, rhs: Term) -> Self {
        Formula::Equals {
            lhs,
            rhs,
            negated: true,
        }
    }

    pub fn and(branches: Vec<Formula>) -> Self {
        Formula::Connective {
            kind: ConnectiveKind::And,
            choice_var: None,
            branches,
        }
    }

    pub fn or(branches: Vec<Formula>) -> Self {
        Formula::Connective {
            kind: ConnectiveKind::Or,
            choice_var: None,
            branches,
        }
    }

    /// Disjunction whose branch index is bound to `choice_var`.
    pub fn choice(choice_var: impl Into<String>, branches: Vec<Formula>) -> Self {
        Formula::Connective {
            kind: ConnectiveKind::Or,
            choice_var: Some(choice_var.into()),
            branches,
        }
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::Forall, var, [] as [&str; 0], body)
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::Exists, var, [] as [&str; 0], body)
    }

    pub fn quant<S: Into<String>>(
        kind: QuantKind,
        var: impl Into<String>,
        slash: impl IntoIterator<Item = S>,
        body: Formula,
    ) -> Self {
        Formula::Quant {
            kind,
            var: var.into(),
            slash: slash.into_iter().map(Into::into).collect(),
            body: Box::new(body),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom { .. } | Formula::Equals { .. } => true,
            Formula::Connective { branches, .. } => branches.iter().all(Formula::is_quantifier_free),
            Formula::Quant { .. } => false,
        }
    }

    /// True when the formula contains no quantifier and no choice-variable
    /// connective.
    pub fn is_classical_qf(&self) -> bool {
        match self {
            Formula::Atom { .. } | Formula::Equals { .. } => true,
            Formula::Connective {
                choice_var,
                branches,
                ..
            } => choice_var.is_none() && branches.iter().all(Formula::is_classical_qf),
            Formula::Quant { .. } => false,
        }
    }

    pub fn children(&self) -> &[Formula] {
        match self {
            Formula::Connective { branches, .. } => branches,
            Formula::Quant { body, .. } => std::slice::from_ref(body),
            _ => &[],
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print_term(self))
    }
}

/// Relation and function symbols with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub relations: Vec<(String, usize)>,
    pub functions: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("duplicate symbol `{0}` in vocabulary")]
pub struct DuplicateSymbol(pub String);

impl Vocabulary {
    pub fn new(
        relations: Vec<(String, usize)>,
        functions: Vec<(String, usize)>,
    ) -> Result<Self, DuplicateSymbol> {
        let mut seen = BTreeSet::new();
        for (sym, _) in relations.iter().chain(functions.iter()) {
            if !seen.insert(sym.as_str()) {
                return Err(DuplicateSymbol(sym.clone()));
            }
        }
        Ok(Vocabulary {
            relations,
            functions,
        })
    }

    pub fn empty() -> Self {
        Vocabulary::default()
    }

    pub fn relation_arity(&self, symbol: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, a)| a)
    }

    pub fn function_arity(&self, symbol: &str) -> Option<usize> {
        self.functions
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, a)| a)
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_rejects_duplicates() {
        let err = Vocabulary::new(vec![("P".into(), 1)], vec![("P".into(), 2)]).unwrap_err();
        assert_eq!(err, DuplicateSymbol("P".into()));
    }

    #[test]
    fn classical_qf_excludes_choice_connectives() {
        let f = Formula::choice("i", vec![Formula::eq(Term::var("x"), Term::var("x"))]);
        assert!(f.is_quantifier_free());
        assert!(!f.is_classical_qf());
    }
}
