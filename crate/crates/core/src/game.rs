//! The semantic game of an IF sentence on a finite structure and its
//! strategic form.
//!
//! A sentence is compiled once into a [`Game`]: every quantifier and every
//! connective that needs a move becomes a [`DecisionPoint`], variables are
//! mapped to slots, and quantifier-free leaves are compiled against the
//! structure's tables. A pure strategy is one choice table per decision
//! point of its owner, indexed by the values of the visible identifiers, so
//! uniformity holds by construction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::formula::{validate, ConnectiveKind, Formula, QuantKind, Term, Violation};
use crate::matrix::GameMatrix;
use crate::structure::{table_index, tuples, Structure};

/// Default cap on the number of pure strategies per player.
pub const DEFAULT_STRATEGY_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Eloise,
    Abelard,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Eloise => "eloise",
            Player::Abelard => "abelard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    /// Into the k-th child (the body of a quantifier is child 0).
    Child(usize),
    /// Into any branch of a choice-variable connective. Positions that
    /// differ only in such a step are one information set.
    AnyBranch,
}

/// Path from the root of a formula to one of its nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Locus(pub Vec<Step>);

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("@")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            match s {
                Step::Child(c) => write!(f, "{c}")?,
                Step::AnyBranch => f.write_str("*")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionPoint {
    pub locus: Locus,
    pub owner: Player,
    /// Identifiers the mover may condition on, in binding order.
    pub visible: Vec<String>,
    pub options: usize,
}

/// One choice table per decision point of `owner`, in formula order. Table
/// rows are indexed mixed-radix by the visible values, first most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureStrategy {
    pub owner: Player,
    pub choices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameBuildReport {
    pub matrix: GameMatrix,
    pub eloise_count: usize,
    pub abelard_count: usize,
    pub collapsed_loci: Vec<Locus>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("invalid sentence: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{player} has {count} pure strategies, budget is {budget}")]
    BudgetExceeded {
        player: Player,
        count: BigUint,
        budget: u64,
    },
    #[error("strategy does not fit the game's decision points")]
    StrategyMismatch,
    #[error("positions at {0} disagree on owner, options or visible identifiers")]
    InconsistentInformationSet(Locus),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug)]
struct Point {
    info: DecisionPoint,
    visible_slots: Vec<usize>,
    radices: Vec<usize>,
    table_len: usize,
    /// Start of this point's table in its owner's flat digit vector.
    offset: usize,
}

#[derive(Debug)]
enum CTerm<'s> {
    Slot(usize),
    App(&'s [usize], Vec<CTerm<'s>>),
}

#[derive(Debug)]
enum Leaf<'s> {
    Rel {
        rel: usize,
        args: Vec<CTerm<'s>>,
        negated: bool,
    },
    Eq {
        lhs: CTerm<'s>,
        rhs: CTerm<'s>,
        negated: bool,
    },
    And(Vec<Leaf<'s>>),
    Or(Vec<Leaf<'s>>),
}

#[derive(Debug)]
enum Node<'s> {
    Quant {
        point: usize,
        slot: usize,
        body: Box<Node<'s>>,
    },
    Branch {
        point: usize,
        slot: Option<usize>,
        branches: Vec<Node<'s>>,
    },
    Leaf(Leaf<'s>),
}

/// A compiled semantic game.
#[derive(Debug)]
pub struct Game<'s> {
    size: usize,
    root: Node<'s>,
    points: Vec<Point>,
    rel_tables: Vec<Vec<bool>>,
    slots: usize,
    digits: [usize; 2],
    collapsed: Vec<Locus>,
}

fn side(p: Player) -> usize {
    match p {
        Player::Eloise => 0,
        Player::Abelard => 1,
    }
}

struct Compiler<'s> {
    s: &'s Structure,
    collapse: bool,
    slot_of: BTreeMap<String, usize>,
    scope: Vec<(String, usize, usize)>,
    path: Vec<Step>,
    points: Vec<Point>,
    by_locus: BTreeMap<Locus, usize>,
    rel_index: BTreeMap<String, usize>,
    rel_tables: Vec<Vec<bool>>,
    collapsed: Vec<Locus>,
}

impl<'s> Compiler<'s> {
    fn slot(&mut self, name: &str) -> usize {
        let next = self.slot_of.len();
        *self.slot_of.entry(name.to_string()).or_insert(next)
    }

    fn point(
        &mut self,
        owner: Player,
        options: usize,
        hidden: &dyn Fn(&str) -> bool,
    ) -> Result<usize, GameError> {
        let locus = Locus(self.path.clone());
        let visible: Vec<&(String, usize, usize)> =
            self.scope.iter().filter(|(n, _, _)| !hidden(n)).collect();
        let info = DecisionPoint {
            locus: locus.clone(),
            owner,
            visible: visible.iter().map(|(n, _, _)| n.clone()).collect(),
            options,
        };
        if let Some(&k) = self.by_locus.get(&locus) {
            if self.points[k].info != info {
                return Err(GameError::InconsistentInformationSet(locus));
            }
            return Ok(k);
        }
        let radices: Vec<usize> = visible.iter().map(|&&(_, _, r)| r).collect();
        let table_len = radices.iter().product();
        self.points.push(Point {
            info,
            visible_slots: visible.iter().map(|&&(_, s, _)| s).collect(),
            radices,
            table_len,
            offset: 0,
        });
        self.by_locus.insert(locus, self.points.len() - 1);
        Ok(self.points.len() - 1)
    }

    fn node(&mut self, f: &Formula) -> Result<Node<'s>, GameError> {
        match f {
            Formula::Atom { .. } | Formula::Equals { .. } => Ok(Node::Leaf(self.leaf(f))),
            Formula::Connective {
                choice_var: None, ..
            } if self.collapse && f.is_classical_qf() => {
                self.note_collapsed(f);
                Ok(Node::Leaf(self.leaf(f)))
            }
            Formula::Connective {
                kind,
                choice_var,
                branches,
            } => {
                let owner = match kind {
                    ConnectiveKind::Or => Player::Eloise,
                    ConnectiveKind::And => Player::Abelard,
                };
                let point = self.point(owner, branches.len(), &|_| false)?;
                let slot = choice_var.as_ref().map(|c| self.slot(c));
                if let (Some(c), Some(s)) = (choice_var, slot) {
                    self.scope.push((c.clone(), s, branches.len()));
                }
                let mut out = Vec::with_capacity(branches.len());
                for (k, b) in branches.iter().enumerate() {
                    self.path.push(if choice_var.is_some() {
                        Step::AnyBranch
                    } else {
                        Step::Child(k)
                    });
                    out.push(self.node(b)?);
                    self.path.pop();
                }
                if choice_var.is_some() {
                    self.scope.pop();
                }
                Ok(Node::Branch {
                    point,
                    slot,
                    branches: out,
                })
            }
            Formula::Quant {
                kind,
                var,
                slash,
                body,
            } => {
                let owner = match kind {
                    QuantKind::Exists => Player::Eloise,
                    QuantKind::Forall => Player::Abelard,
                };
                let point = self.point(owner, self.s.size(), &|n| slash.contains(n))?;
                let slot = self.slot(var);
                self.scope.push((var.clone(), slot, self.s.size()));
                self.path.push(Step::Child(0));
                let body = self.node(body)?;
                self.path.pop();
                self.scope.pop();
                Ok(Node::Quant {
                    point,
                    slot,
                    body: Box::new(body),
                })
            }
        }
    }

    fn note_collapsed(&mut self, f: &Formula) {
        if let Formula::Connective { branches, .. } = f {
            self.collapsed.push(Locus(self.path.clone()));
            for (k, b) in branches.iter().enumerate() {
                self.path.push(Step::Child(k));
                self.note_collapsed(b);
                self.path.pop();
            }
        }
    }

    fn term(&mut self, t: &Term) -> CTerm<'s> {
        match t {
            Term::Var(v) => CTerm::Slot(self.slot(v)),
            Term::App(sym, args) => {
                let table = &self.s.functions()[sym].table;
                CTerm::App(table, args.iter().map(|a| self.term(a)).collect())
            }
        }
    }

    fn leaf(&mut self, f: &Formula) -> Leaf<'s> {
        match f {
            Formula::Atom { rel, args, negated } => {
                let rel = match self.rel_index.get(rel) {
                    Some(&k) => k,
                    None => {
                        let r = &self.s.relations()[rel];
                        let size = self.s.size();
                        let table = tuples(size, r.arity).map(|t| r.tuples.contains(&t)).collect();
                        self.rel_tables.push(table);
                        self.rel_index.insert(rel.clone(), self.rel_tables.len() - 1);
                        self.rel_tables.len() - 1
                    }
                };
                Leaf::Rel {
                    rel,
                    args: args.iter().map(|a| self.term(a)).collect(),
                    negated: *negated,
                }
            }
            Formula::Equals { lhs, rhs, negated } => Leaf::Eq {
                lhs: self.term(lhs),
                rhs: self.term(rhs),
                negated: *negated,
            },
            Formula::Connective { kind, branches, .. } => {
                let bs = branches.iter().map(|b| self.leaf(b)).collect();
                match kind {
                    ConnectiveKind::And => Leaf::And(bs),
                    ConnectiveKind::Or => Leaf::Or(bs),
                }
            }
            Formula::Quant { .. } => unreachable!("leaves are quantifier-free"),
        }
    }
}

impl<'s> Game<'s> {
    /// Validates `f` against the vocabulary of `s` and compiles it. With
    /// `collapse`, every connective without a choice variable whose whole
    /// subformula is quantifier-free is resolved by classical evaluation
    /// instead of being a move.
    pub fn new(s: &'s Structure, f: &Formula, collapse: bool) -> Result<Self, GameError> {
        let violations = validate(f, &s.vocabulary());
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        let mut c = Compiler {
            s,
            collapse,
            slot_of: BTreeMap::new(),
            scope: Vec::new(),
            path: Vec::new(),
            points: Vec::new(),
            by_locus: BTreeMap::new(),
            rel_index: BTreeMap::new(),
            rel_tables: Vec::new(),
            collapsed: Vec::new(),
        };
        let root = c.node(f)?;
        let mut points = c.points;
        let mut digits = [0, 0];
        for p in &mut points {
            let d = &mut digits[side(p.info.owner)];
            p.offset = *d;
            *d += p.table_len;
        }
        Ok(Game {
            size: s.size(),
            root,
            points,
            rel_tables: c.rel_tables,
            slots: c.slot_of.len(),
            digits,
            collapsed: c.collapsed,
        })
    }

    pub fn decision_points(&self) -> Vec<DecisionPoint> {
        self.points.iter().map(|p| p.info.clone()).collect()
    }

    pub fn collapsed_loci(&self) -> &[Locus] {
        &self.collapsed
    }

    fn owned(&self, player: Player) -> impl Iterator<Item = &Point> {
        self.points.iter().filter(move |p| p.info.owner == player)
    }

    /// `Π options^(table size)` over the player's decision points.
    pub fn strategy_count(&self, player: Player) -> BigUint {
        self.owned(player).fold(BigUint::one(), |acc, p| {
            acc * BigUint::from(p.info.options).pow(p.table_len as u32)
        })
    }

    fn checked_count(&self, player: Player, budget: u64) -> Result<usize, GameError> {
        let count = self.strategy_count(player);
        match count.to_u64() {
            Some(c) if c <= budget => Ok(c as usize),
            _ => Err(GameError::BudgetExceeded {
                player,
                count,
                budget,
            }),
        }
    }

    /// Flat digits of the `index`-th strategy in lexicographic order.
    fn decode(&self, player: Player, mut index: usize, out: &mut Vec<usize>) {
        out.clear();
        out.resize(self.digits[side(player)], 0);
        let radix: Vec<usize> = self
            .owned(player)
            .flat_map(|p| std::iter::repeat_n(p.info.options, p.table_len))
            .collect();
        for (d, r) in out.iter_mut().zip(radix).rev() {
            *d = index % r;
            index /= r;
        }
    }

    fn split(&self, player: Player, flat: &[usize]) -> PureStrategy {
        let choices = self
            .owned(player)
            .map(|p| flat[p.offset..p.offset + p.table_len].to_vec())
            .collect();
        PureStrategy {
            owner: player,
            choices,
        }
    }

    fn flatten(&self, st: &PureStrategy, player: Player) -> Result<Vec<usize>, GameError> {
        let pts: Vec<&Point> = self.owned(player).collect();
        let fits = st.owner == player
            && st.choices.len() == pts.len()
            && st.choices.iter().zip(&pts).all(|(t, p)| {
                t.len() == p.table_len && t.iter().all(|&o| o < p.info.options)
            });
        if !fits {
            return Err(GameError::StrategyMismatch);
        }
        Ok(st.choices.concat())
    }

    pub fn enumerate_strategies(
        &self,
        player: Player,
        budget: u64,
    ) -> Result<Vec<PureStrategy>, GameError> {
        let count = self.checked_count(player, budget)?;
        let mut buf = Vec::new();
        Ok((0..count)
            .map(|k| {
                self.decode(player, k, &mut buf);
                self.split(player, &buf)
            })
            .collect())
    }

    /// Eloise's payoff when `sigma` meets `tau`.
    pub fn play(&self, sigma: &PureStrategy, tau: &PureStrategy) -> Result<u8, GameError> {
        let e = self.flatten(sigma, Player::Eloise)?;
        let a = self.flatten(tau, Player::Abelard)?;
        Ok(self.run(&e, &a, &mut vec![0; self.slots]))
    }

    fn run(&self, e: &[usize], a: &[usize], slots: &mut [usize]) -> u8 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Quant { point, slot, body } => {
                    slots[*slot] = self.choose(*point, e, a, slots);
                    node = body;
                }
                Node::Branch {
                    point,
                    slot,
                    branches,
                } => {
                    let k = self.choose(*point, e, a, slots);
                    if let Some(s) = slot {
                        slots[*s] = k;
                    }
                    node = &branches[k];
                }
                Node::Leaf(l) => return self.eval(l, slots) as u8,
            }
        }
    }

    fn choose(&self, point: usize, e: &[usize], a: &[usize], slots: &[usize]) -> usize {
        let p = &self.points[point];
        let idx = p
            .visible_slots
            .iter()
            .zip(&p.radices)
            .fold(0, |acc, (&s, &r)| acc * r + slots[s]);
        let digits = match p.info.owner {
            Player::Eloise => e,
            Player::Abelard => a,
        };
        digits[p.offset + idx]
    }

    fn value(&self, t: &CTerm<'_>, slots: &[usize]) -> usize {
        match t {
            CTerm::Slot(s) => slots[*s],
            CTerm::App(table, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.value(a, slots)).collect();
                table[table_index(self.size, &vals)]
            }
        }
    }

    fn eval(&self, l: &Leaf<'_>, slots: &[usize]) -> bool {
        match l {
            Leaf::Rel { rel, args, negated } => {
                let vals: Vec<usize> = args.iter().map(|a| self.value(a, slots)).collect();
                self.rel_tables[*rel][table_index(self.size, &vals)] != *negated
            }
            Leaf::Eq { lhs, rhs, negated } => {
                (self.value(lhs, slots) == self.value(rhs, slots)) != *negated
            }
            // or: first true branch; and: first false branch
            Leaf::And(bs) => bs.iter().all(|b| self.eval(b, slots)),
            Leaf::Or(bs) => bs.iter().any(|b| self.eval(b, slots)),
        }
    }

    /// The strategic form: entry `(i, j)` is the outcome of Eloise's `i`-th
    /// strategy against Abelard's `j`-th, both in lexicographic order.
    pub fn build_matrix(&self, budget: u64) -> Result<GameBuildReport, GameError> {
        let rows = self.checked_count(Player::Eloise, budget)?;
        let cols = self.checked_count(Player::Abelard, budget)?;
        let eloise: Vec<Vec<usize>> = (0..rows)
            .map(|i| {
                let mut d = Vec::new();
                self.decode(Player::Eloise, i, &mut d);
                d
            })
            .collect();
        let columns: Vec<Vec<u8>> = (0..cols)
            .into_par_iter()
            .map_init(
                || (Vec::new(), vec![0; self.slots]),
                |(a, slots), j| {
                    self.decode(Player::Abelard, j, a);
                    eloise.iter().map(|e| self.run(e, a, slots)).collect()
                },
            )
            .collect();
        let mut data = vec![0u8; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Ok(GameBuildReport {
            matrix: GameMatrix::new(rows, cols, data).expect("entries are 0/1"),
            eloise_count: rows,
            abelard_count: cols,
            collapsed_loci: self.collapsed.clone(),
        })
    }
}

pub fn decision_points(s: &Structure, f: &Formula) -> Result<Vec<DecisionPoint>, GameError> {
    Ok(Game::new(s, f, false)?.decision_points())
}

pub fn enumerate_strategies(
    s: &Structure,
    f: &Formula,
    player: Player,
    collapse: bool,
    budget: u64,
) -> Result<Vec<PureStrategy>, GameError> {
    Game::new(s, f, collapse)?.enumerate_strategies(player, budget)
}

pub fn play(
    s: &Structure,
    f: &Formula,
    collapse: bool,
    sigma: &PureStrategy,
    tau: &PureStrategy,
) -> Result<u8, GameError> {
    Game::new(s, f, collapse)?.play(sigma, tau)
}

pub fn build_matrix(
    s: &Structure,
    f: &Formula,
    collapse: bool,
    budget: u64,
) -> Result<GameBuildReport, GameError> {
    Game::new(s, f, collapse)?.build_matrix(budget)
}
