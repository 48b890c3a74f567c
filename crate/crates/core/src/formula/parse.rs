//! Recursive-descent parser for the ASCII surface syntax.
//!
//! ```text
//! sentence := formula EOF
//! formula  := quant formula | disj
//! quant    := ('A'|'E') ident | '(' ('A'|'E') ident '/' identlist ')'
//! disj     := conj ('|' conj)* | '\/_' ident '{' formula (',' formula)* '}'
//! conj     := atomf ('&' atomf)*
//! atomf    := '~'? atom | '(' formula ')'
//! atom     := ident '(' termlist ')' | term '=' term
//! term     := primary ('+' primary)*
//! primary  := ident | ident '(' termlist ')' | '+' '(' termlist ')'
//! ```
//!
//! `Ax` lexes as a single word, so a word at the start of a formula is read
//! as a quantifier only when it is not a relation followed by `(`, not a
//! function symbol and not a variable already in scope.

use std::collections::BTreeSet;

use super::{is_ident_char, is_ident_start, validate, Formula, QuantKind, Term, Violation, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound variable `{name}` at offset {pos}")]
    UnboundVariable { pos: usize, name: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("slash set at offset {pos} mentions `{name}`, which is not in scope")]
    SlashOutOfScope { pos: usize, name: String },
    #[error("`{name}` at offset {pos} takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("choice variable `{name}` used as a term at offset {pos}")]
    ChoiceVarInTerm { pos: usize, name: String },
    #[error("ill-formed sentence: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnboundVariable { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::SlashOutOfScope { pos, .. }
            | ParseError::ArityMismatch { pos, .. }
            | ParseError::ChoiceVarInTerm { pos, .. } => Some(*pos),
            ParseError::Invalid(_) => None,
        }
    }
}

/// Parse a sentence over `vocab`. The result satisfies every check of
/// [`validate`].
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        vocab,
        scope: Vec::new(),
    };
    let f = p.formula()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    let violations = validate(&f, vocab);
    if violations.is_empty() {
        Ok(f)
    } else {
        Err(ParseError::Invalid(violations))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Binder {
    Var,
    Choice,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vocab: &'a Vocabulary,
    scope: Vec<(String, Binder)>,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    /// Next non-whitespace character without consuming anything.
    fn peek_ws(&self) -> Option<char> {
        self.src[self.pos..].chars().find(|c| !c.is_whitespace())
    }

    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// Read a maximal identifier, returning it with its start offset.
    fn word(&mut self) -> Option<(usize, &'a str)> {
        self.ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if is_ident_start(c) => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !is_ident_char(c))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.pos = start + end;
        Some((start, &rest[..end]))
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.word().ok_or_else(|| self.syntax("expected identifier"))
    }

    fn bound(&self, name: &str) -> Option<Binder> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, b)| b)
    }

    /// Decide whether `w` (already read, followed by the current position)
    /// opens a quantifier. Returns the quantifier kind and bound variable.
    fn quantifier_head(&mut self, w: &'a str) -> Result<Option<(QuantKind, String)>, ParseError> {
        let next = self.peek_ws();
        if next == Some('(') && self.vocab.relation_arity(w).is_some() {
            return Ok(None);
        }
        if self.bound(w).is_some() || self.vocab.function_arity(w).is_some() {
            return Ok(None);
        }
        let kind = match w.as_bytes()[0] {
            b'A' => QuantKind::Forall,
            b'E' => QuantKind::Exists,
            _ => return Ok(None),
        };
        if w.len() > 1 {
            return Ok(Some((kind, w[1..].to_string())));
        }
        let (_, var) = self.ident()?;
        Ok(Some((kind, var.to_string())))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.ws();
        let save = self.pos;

        if self.eat('(') {
            if let Some((kind, var, slash)) = self.slashed_head()? {
                return self.quant_body(kind, var, slash);
            }
            self.pos = save;
        } else if let Some((_, w)) = self.word() {
            if let Some((kind, var)) = self.quantifier_head(w)? {
                return self.quant_body(kind, var, BTreeSet::new());
            }
            self.pos = save;
        }
        self.disj()
    }

    /// After `(`: try to read `Qx/ids)`. Leaves the position unspecified when
    /// returning `None`; the caller restores it.
    fn slashed_head(&mut self) -> Result<Option<(QuantKind, String, BTreeSet<String>)>, ParseError> {
        let Some((_, w)) = self.word() else {
            return Ok(None);
        };
        let kind = match w.as_bytes()[0] {
            b'A' => QuantKind::Forall,
            b'E' => QuantKind::Exists,
            _ => return Ok(None),
        };
        let var = if w.len() > 1 {
            w[1..].to_string()
        } else {
            match self.word() {
                Some((_, v)) => v.to_string(),
                None => return Ok(None),
            }
        };
        if !self.eat('/') {
            return Ok(None);
        }
        let mut slash = BTreeSet::new();
        loop {
            self.ws();
            if self.eat(')') {
                break;
            }
            if !slash.is_empty() {
                self.eat(',');
            }
            let (pos, name) = self.ident()?;
            if self.bound(name).is_none() {
                return Err(ParseError::SlashOutOfScope {
                    pos,
                    name: name.to_string(),
                });
            }
            slash.insert(name.to_string());
        }
        if slash.is_empty() {
            return Err(self.syntax("empty slash set"));
        }
        Ok(Some((kind, var, slash)))
    }

    fn quant_body(
        &mut self,
        kind: QuantKind,
        var: String,
        slash: BTreeSet<String>,
    ) -> Result<Formula, ParseError> {
        self.scope.push((var.clone(), Binder::Var));
        let body = self.formula();
        self.scope.pop();
        Ok(Formula::Quant {
            kind,
            var,
            slash,
            body: Box::new(body?),
        })
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        if self.eat_str("\\/_") {
            let (_, cv) = self.ident()?;
            let cv = cv.to_string();
            self.expect('{')?;
            self.scope.push((cv.clone(), Binder::Choice));
            let mut branches = Vec::new();
            let res = (|| {
                loop {
                    branches.push(self.formula()?);
                    if self.eat('}') {
                        return Ok(());
                    }
                    self.expect(',')?;
                }
            })();
            self.scope.pop();
            res?;
            return Ok(Formula::choice(cv, branches));
        }
        let mut branches = vec![self.conj()?];
        while self.eat('|') {
            branches.push(self.conj()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Formula::or(branches)
        })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut branches = vec![self.atomf()?];
        while self.eat('&') {
            branches.push(self.atomf()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Formula::and(branches)
        })
    }

    fn atomf(&mut self) -> Result<Formula, ParseError> {
        if self.eat('~') {
            if self.peek_ws() == Some('(') {
                return Err(self.syntax("negation applies to atoms only"));
            }
            return self.atom(true);
        }
        if self.eat('(') {
            let f = self.formula()?;
            self.expect(')')?;
            return Ok(f);
        }
        self.atom(false)
    }

    fn atom(&mut self, negated: bool) -> Result<Formula, ParseError> {
        self.ws();
        let save = self.pos;
        if let Some((pos, w)) = self.word() {
            if let Some(arity) = self.vocab.relation_arity(w) {
                if self.peek_ws() == Some('(') {
                    self.expect('(')?;
                    let args = self.term_list()?;
                    if args.len() != arity {
                        return Err(ParseError::ArityMismatch {
                            pos,
                            name: w.to_string(),
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    return Ok(Formula::Atom {
                        rel: w.to_string(),
                        args,
                        negated,
                    });
                }
            }
        }
        self.pos = save;
        let lhs = self.term()?;
        self.expect('=')?;
        let rhs = self.term()?;
        Ok(Formula::Equals { lhs, rhs, negated })
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.eat(')') {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(')') {
                return Ok(args);
            }
            self.expect(',')?;
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.primary()?;
        loop {
            self.ws();
            let pos = self.pos;
            // after a primary a `+` is always infix; `+(` is handled by primary
            if !self.src[pos..].starts_with('+') {
                return Ok(t);
            }
            self.pos += 1;
            self.check_function("+", 2, pos)?;
            let rhs = self.primary()?;
            t = Term::plus(t, rhs);
        }
    }

    fn check_function(&self, name: &str, found: usize, pos: usize) -> Result<(), ParseError> {
        match self.vocab.function_arity(name) {
            None => Err(ParseError::UnknownSymbol {
                pos,
                name: name.to_string(),
            }),
            Some(expected) if expected != found => Err(ParseError::ArityMismatch {
                pos,
                name: name.to_string(),
                expected,
                found,
            }),
            Some(_) => Ok(()),
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        self.ws();
        let pos = self.pos;
        if self.src[pos..].starts_with('+') {
            self.pos += 1;
            self.expect('(')?;
            let args = self.term_list()?;
            self.check_function("+", args.len(), pos)?;
            return Ok(Term::App("+".into(), args));
        }
        let (pos, w) = self.ident()?;
        if self.peek_ws() == Some('(') {
            self.expect('(')?;
            let args = self.term_list()?;
            self.check_function(w, args.len(), pos)?;
            return Ok(Term::App(w.to_string(), args));
        }
        match self.bound(w) {
            Some(Binder::Var) => Ok(Term::Var(w.to_string())),
            Some(Binder::Choice) => Err(ParseError::ChoiceVarInTerm {
                pos,
                name: w.to_string(),
            }),
            None if self.vocab.function_arity(w) == Some(0) => Ok(Term::App(w.to_string(), vec![])),
            None => Err(ParseError::UnboundVariable {
                pos,
                name: w.to_string(),
            }),
        }
    }
}
