//! Finite structures over the universe `{0, …, n−1}` and classical
//! evaluation of quantifier-free formulas.
//!
//! The on-disk format is a JSON object:
//!
//! ```json
//! {
//!   "size": 3,
//!   "relations": { "U": [[0], [1]] },
//!   "functions": { "+": [[0, 0, 0], [0, 1, 1], …] }
//! }
//! ```
//!
//! A function lists exactly `size^arity` rows `[args…, value]`. An empty
//! relation cannot carry its arity as a list, so it is written
//! `{"arity": k, "tuples": []}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::formula::{Formula, Term, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A total function table; row index is the mixed-radix encoding of the
/// arguments, first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub arity: usize,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    size: usize,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, Function>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("element {value} in `{symbol}` is outside the universe 0..{size}")]
    OutOfRange {
        symbol: String,
        value: usize,
        size: usize,
    },
    #[error("function `{symbol}` is not total: expected {expected} rows, found {found}")]
    PartialFunction {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("`{symbol}`: tuple has length {found}, expected {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    MissingVariable(String),
    #[error("symbol `{0}` is not interpreted in the structure")]
    MissingSymbol(String),
    #[error("`{symbol}` applied to {found} argument(s), arity is {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}

/// Values for variables, plus branch indices for choice variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    vars: BTreeMap<String, usize>,
    choices: BTreeMap<String, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, value: usize) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, value: usize) {
        self.vars.insert(var.into(), value);
    }

    pub fn set_choice(&mut self, var: impl Into<String>, branch: usize) {
        self.choices.insert(var.into(), branch);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.vars.get(var).copied()
    }

    pub fn choice(&self, var: &str) -> Option<usize> {
        self.choices.get(var).copied()
    }
}

/// Mixed-radix index of `args` in a table over `size^args.len()` rows.
pub(crate) fn table_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

impl Structure {
    pub fn new(size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        Ok(Structure {
            size,
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn functions(&self) -> &BTreeMap<String, Function> {
        &self.functions
    }

    fn check_fresh(&self, symbol: &str) -> Result<(), StructureError> {
        if self.relations.contains_key(symbol) || self.functions.contains_key(symbol) {
            Err(StructureError::DuplicateSymbol(symbol.to_string()))
        } else {
            Ok(())
        }
    }

    fn check_elem(&self, symbol: &str, value: usize) -> Result<(), StructureError> {
        if value < self.size {
            Ok(())
        } else {
            Err(StructureError::OutOfRange {
                symbol: symbol.to_string(),
                value,
                size: self.size,
            })
        }
    }

    pub fn add_relation(
        &mut self,
        symbol: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<(), StructureError> {
        let symbol = symbol.into();
        self.check_fresh(&symbol)?;
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(StructureError::ArityMismatch {
                    symbol,
                    expected: arity,
                    found: t.len(),
                });
            }
            for &e in &t {
                self.check_elem(&symbol, e)?;
            }
            set.insert(t);
        }
        self.relations.insert(symbol, Relation { arity, tuples: set });
        Ok(())
    }

    /// Add a function given as a dense table in mixed-radix order.
    pub fn add_function_table(
        &mut self,
        symbol: impl Into<String>,
        arity: usize,
        table: Vec<usize>,
    ) -> Result<(), StructureError> {
        let symbol = symbol.into();
        self.check_fresh(&symbol)?;
        let expected = self.size.pow(arity as u32);
        if table.len() != expected {
            return Err(StructureError::PartialFunction {
                symbol,
                expected,
                found: table.len(),
            });
        }
        for &v in &table {
            self.check_elem(&symbol, v)?;
        }
        self.functions.insert(symbol, Function { arity, table });
        Ok(())
    }

    /// Add a function by evaluating `f` on every argument tuple.
    pub fn add_function(
        &mut self,
        symbol: impl Into<String>,
        arity: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<(), StructureError> {
        let table = tuples(self.size, arity).map(|args| f(&args)).collect();
        self.add_function_table(symbol, arity, table)
    }

    pub fn holds(&self, symbol: &str, args: &[usize]) -> Option<bool> {
        self.relations.get(symbol).map(|r| r.tuples.contains(args))
    }

    pub fn apply(&self, symbol: &str, args: &[usize]) -> Option<usize> {
        self.functions
            .get(symbol)
            .map(|f| f.table[table_index(self.size, args)])
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary {
            relations: self
                .relations
                .iter()
                .map(|(s, r)| (s.clone(), r.arity))
                .collect(),
            functions: self
                .functions
                .iter()
                .map(|(s, f)| (s.clone(), f.arity))
                .collect(),
        }
    }

    pub fn eval_term(&self, a: &Assignment, t: &Term) -> Result<usize, EvalError> {
        match t {
            Term::Var(v) => a.get(v).ok_or_else(|| EvalError::MissingVariable(v.clone())),
            Term::App(sym, args) => {
                let f = self
                    .functions
                    .get(sym)
                    .ok_or_else(|| EvalError::MissingSymbol(sym.clone()))?;
                if f.arity != args.len() {
                    return Err(EvalError::ArityMismatch {
                        symbol: sym.clone(),
                        expected: f.arity,
                        found: args.len(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|t| self.eval_term(a, t))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(f.table[table_index(self.size, &vals)])
            }
        }
    }

    /// Classical truth of a quantifier-free formula. Choice-variable
    /// connectives are evaluated as ordinary connectives.
    pub fn holds_qf(&self, a: &Assignment, f: &Formula) -> Result<bool, EvalError> {
        use crate::formula::ConnectiveKind;
        match f {
            Formula::Atom { rel, args, negated } => {
                let r = self
                    .relations
                    .get(rel)
                    .ok_or_else(|| EvalError::MissingSymbol(rel.clone()))?;
                if r.arity != args.len() {
                    return Err(EvalError::ArityMismatch {
                        symbol: rel.clone(),
                        expected: r.arity,
                        found: args.len(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|t| self.eval_term(a, t))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(r.tuples.contains(&vals) != *negated)
            }
            Formula::Equals { lhs, rhs, negated } => {
                Ok((self.eval_term(a, lhs)? == self.eval_term(a, rhs)?) != *negated)
            }
            Formula::Connective { kind, branches, .. } => {
                for b in branches {
                    let v = self.holds_qf(a, b)?;
                    match kind {
                        ConnectiveKind::Or if v => return Ok(true),
                        ConnectiveKind::And if !v => return Ok(false),
                        _ => {}
                    }
                }
                Ok(*kind == ConnectiveKind::And)
            }
            Formula::Quant { .. } => Err(EvalError::NotQuantifierFree),
        }
    }

    pub fn load(text: &str) -> Result<Self, StructureError> {
        let raw: RawStructure =
            serde_json::from_str(text).map_err(|e| StructureError::Malformed(e.to_string()))?;
        let mut s = Structure::new(raw.size)?;
        for (sym, rel) in raw.relations {
            let (arity, tuples) = match rel {
                RawRelation::Tuples(ts) => {
                    let Some(first) = ts.first() else {
                        return Err(StructureError::Malformed(format!(
                            "empty relation `{sym}` must use the {{\"arity\", \"tuples\"}} form"
                        )));
                    };
                    (first.len(), ts)
                }
                RawRelation::Declared { arity, tuples } => (arity, tuples),
            };
            s.add_relation(sym, arity, tuples)?;
        }
        for (sym, rows) in raw.functions {
            let Some(first) = rows.first() else {
                return Err(StructureError::Malformed(format!("function `{sym}` has no rows")));
            };
            if first.is_empty() {
                return Err(StructureError::Malformed(format!("function `{sym}` has an empty row")));
            }
            let arity = first.len() - 1;
            let expected = s.size.pow(arity as u32);
            let mut table: Vec<Option<usize>> = vec![None; expected];
            for row in &rows {
                if row.len() != arity + 1 {
                    return Err(StructureError::ArityMismatch {
                        symbol: sym.clone(),
                        expected: arity + 1,
                        found: row.len(),
                    });
                }
                for &e in row {
                    s.check_elem(&sym, e)?;
                }
                let slot = &mut table[table_index(s.size, &row[..arity])];
                if slot.is_some() {
                    return Err(StructureError::Malformed(format!(
                        "function `{sym}` defines {:?} twice",
                        &row[..arity]
                    )));
                }
                *slot = Some(row[arity]);
            }
            let found = table.iter().filter(|v| v.is_some()).count();
            if found != expected {
                return Err(StructureError::PartialFunction {
                    symbol: sym,
                    expected,
                    found,
                });
            }
            s.add_function_table(sym, arity, table.into_iter().map(Option::unwrap).collect())?;
        }
        Ok(s)
    }

    /// Canonical text form; `load(save(s)) == s`, and `save` of a loaded
    /// canonical file reproduces it byte for byte.
    pub fn save(&self) -> String {
        let key = |s: &str| serde_json::to_string(s).expect("string serialization");
        let tuple = |t: &[usize]| {
            format!(
                "[{}]",
                t.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            )
        };
        let mut out = String::new();
        writeln!(out, "{{").unwrap();
        writeln!(out, "  \"size\": {},", self.size).unwrap();

        if self.relations.is_empty() {
            writeln!(out, "  \"relations\": {{}},").unwrap();
        } else {
            writeln!(out, "  \"relations\": {{").unwrap();
            let n = self.relations.len();
            for (k, (sym, r)) in self.relations.iter().enumerate() {
                let sep = if k + 1 < n { "," } else { "" };
                if r.tuples.is_empty() {
                    writeln!(out, "    {}: {{\"arity\": {}, \"tuples\": []}}{sep}", key(sym), r.arity).unwrap();
                } else {
                    let ts: Vec<String> = r.tuples.iter().map(|t| tuple(t)).collect();
                    writeln!(out, "    {}: [{}]{sep}", key(sym), ts.join(", ")).unwrap();
                }
            }
            writeln!(out, "  }},").unwrap();
        }

        if self.functions.is_empty() {
            writeln!(out, "  \"functions\": {{}}").unwrap();
        } else {
            writeln!(out, "  \"functions\": {{").unwrap();
            let n = self.functions.len();
            for (k, (sym, f)) in self.functions.iter().enumerate() {
                writeln!(out, "    {}: [", key(sym)).unwrap();
                let rows = f.table.len();
                for (idx, args) in tuples(self.size, f.arity).enumerate() {
                    let mut row = args;
                    row.push(f.table[idx]);
                    let sep = if idx + 1 < rows { "," } else { "" };
                    writeln!(out, "      {}{sep}", tuple(&row)).unwrap();
                }
                let sep = if k + 1 < n { "," } else { "" };
                writeln!(out, "    ]{sep}").unwrap();
            }
            writeln!(out, "  }}").unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }
}

/// All tuples over `0..size` of length `arity`, in mixed-radix order.
pub fn tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = size.pow(arity as u32);
    (0..count).map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % size;
            idx /= size;
        }
        t
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    size: usize,
    #[serde(default)]
    relations: BTreeMap<String, RawRelation>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRelation {
    Tuples(Vec<Vec<usize>>),
    Declared { arity: usize, tuples: Vec<Vec<usize>> },
}
