//! First-order terms over plain and tuple (`#`-marked) symbols.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Whether a symbol is an ordinary function symbol or its `#`-marked tuple twin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Plain,
    Tuple,
}

/// A function symbol with a fixed arity.
///
/// Two symbols are equal iff name, arity and kind agree, so `f` and `f#` are
/// distinct symbols sharing a name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
    kind: SymbolKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {position} is not a position of {term}")]
    PositionOutOfRange { position: Position, term: String },
    #[error("symbol {0} is already a tuple symbol")]
    AlreadyMarked(String),
    #[error("symbol {0} is not a tuple symbol")]
    NotMarked(String),
    #[error("cannot mark a variable")]
    VariableRoot,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            kind: SymbolKind::Plain,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_tuple(&self) -> bool {
        self.kind == SymbolKind::Tuple
    }

    /// The tuple symbol `f#` of a plain symbol `f`.
    pub fn marked(&self) -> Result<Symbol, TermError> {
        match self.kind {
            SymbolKind::Plain => Ok(Symbol {
                name: self.name.clone(),
                arity: self.arity,
                kind: SymbolKind::Tuple,
            }),
            SymbolKind::Tuple => Err(TermError::AlreadyMarked(self.to_string())),
        }
    }

    /// The plain symbol `f` of a tuple symbol `f#`.
    pub fn unmarked(&self) -> Result<Symbol, TermError> {
        match self.kind {
            SymbolKind::Tuple => Ok(Symbol {
                name: self.name.clone(),
                arity: self.arity,
                kind: SymbolKind::Plain,
            }),
            SymbolKind::Plain => Err(TermError::NotMarked(self.to_string())),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Plain => write!(f, "{}", self.name),
            SymbolKind::Tuple => write!(f, "{}#", self.name),
        }
    }
}

/// A variable identifier. Identifiers are issued by a [`VarSupply`] and are
/// globally unique within one analysis; display names live in [`VarNames`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Monotone source of variables never issued before.
#[derive(Debug, Clone, Default)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    pub fn new() -> Self {
        VarSupply { next: 0 }
    }

    /// A supply whose first draw is `start`.
    pub fn starting_at(start: u32) -> Self {
        VarSupply { next: start }
    }

    /// A supply that never collides with any variable of `terms`.
    pub fn above<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let next = terms
            .into_iter()
            .filter_map(Term::max_var)
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0);
        VarSupply { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next = self.next.checked_add(1).expect("variable supply exhausted");
        v
    }

    /// The identifier the next draw will return.
    pub fn peek(&self) -> u32 {
        self.next
    }

    /// Make sure future draws are strictly above `v`.
    pub fn reserve(&mut self, v: Var) {
        self.next = self.next.max(v.0 + 1);
    }
}

/// A position: a sequence of 1-indexed argument steps; empty is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_steps(steps: impl Into<Vec<usize>>) -> Self {
        let steps = steps.into();
        assert!(steps.iter().all(|&s| s > 0), "position steps are 1-indexed");
        Position(steps)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        debug_assert!(i > 0);
        let mut steps = self.0.clone();
        steps.push(i);
        Position(steps)
    }

    /// `self ≤ other`: `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self < other`: a proper prefix.
    pub fn is_proper_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// Prefix-related in either direction.
    pub fn is_comparable(&self, other: &Position) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(format!("invalid position step {part:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// A first-order term. Argument lists are shared; every operation returns a
/// new term and never mutates one visible to callers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    /// Build an application; panics if the argument count disagrees with the arity.
    pub fn app(sym: Symbol, args: impl Into<Vec<Term>>) -> Term {
        let args = args.into();
        assert_eq!(sym.arity(), args.len(), "arity mismatch for symbol {sym}");
        Term::App(sym, args.into())
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Symbol::new(name, 0), Arc::from(Vec::new()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(..) => None,
        }
    }

    /// Root symbol; `None` plays the role of ⊥ for variables.
    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(sym, _) => Some(sym),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// Depth counting a variable or constant as 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_in_order(out)),
        }
    }

    pub fn max_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn occurs(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// All positions in pre-order, which is also lexicographic order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.positions_into(&mut path, &mut out);
        out
    }

    fn positions_into(&self, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        out.push(Position(path.clone()));
        for (i, arg) in self.args().iter().enumerate() {
            path.push(i + 1);
            arg.positions_into(path, out);
            path.pop();
        }
    }

    pub fn get(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &step in p.steps() {
            t = t.args().get(step.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// `t|_p`.
    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        self.get(p).ok_or_else(|| TermError::PositionOutOfRange {
            position: p.clone(),
            term: self.to_string(),
        })
    }

    /// `t[p ← s]`.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        if self.get(p).is_none() {
            return Err(TermError::PositionOutOfRange {
                position: p.clone(),
                term: self.to_string(),
            });
        }
        Ok(self.replace_steps(p.steps(), s))
    }

    fn replace_steps(&self, steps: &[usize], s: Term) -> Term {
        match steps.split_first() {
            None => s,
            Some((&i, rest)) => match self {
                Term::App(sym, args) => {
                    let mut new_args = args.to_vec();
                    new_args[i - 1] = args[i - 1].replace_steps(rest, s);
                    Term::App(sym.clone(), new_args.into())
                }
                Term::Var(_) => unreachable!("position checked before replacement"),
            },
        }
    }

    /// The `#`-marked version `t#` of a plain-rooted application.
    pub fn mark_root(&self) -> Result<Term, TermError> {
        match self {
            Term::Var(_) => Err(TermError::VariableRoot),
            Term::App(sym, args) => Ok(Term::App(sym.marked()?, args.clone())),
        }
    }

    /// Remove the tuple mark from the root.
    pub fn unmark_root(&self) -> Result<Term, TermError> {
        match self {
            Term::Var(_) => Err(TermError::VariableRoot),
            Term::App(sym, args) => Ok(Term::App(sym.unmarked()?, args.clone())),
        }
    }

    /// Rename variables through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(*v)),
            Term::App(sym, args) => {
                if args.is_empty() {
                    return self.clone();
                }
                Term::App(sym.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    /// Render with display names for variables that have one.
    pub fn display<'a>(&'a self, names: &'a VarNames) -> TermDisplay<'a> {
        TermDisplay { term: self, names }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, None)
    }
}

/// Display names of variables that came from parsed input.
pub type VarNames = std::collections::BTreeMap<Var, String>;

pub struct TermDisplay<'a> {
    term: &'a Term,
    names: &'a VarNames,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self.term, Some(self.names))
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, names: Option<&VarNames>) -> fmt::Result {
    match t {
        Term::Var(v) => match names.and_then(|n| n.get(v)) {
            Some(name) => write!(f, "{name}"),
            None => write!(f, "{v}"),
        },
        Term::App(sym, args) => {
            write!(f, "{sym}")?;
            if !args.is_empty() {
                write!(f, "(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write_term(f, arg, names)?;
                }
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

/// Disagreement positions of `s` and `t`, in lexicographic order.
///
/// A position is reported where the roots first differ along a path; roots of
/// two variables are both ⊥ and therefore agree.
pub fn dpos(s: &Term, t: &Term) -> Vec<Position> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    dpos_into(s, t, &mut path, &mut out);
    out
}

fn dpos_into(s: &Term, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    if s.root() != t.root() {
        out.push(Position(path.clone()));
        return;
    }
    for (i, (a, b)) in s.args().iter().zip(t.args()).enumerate() {
        path.push(i + 1);
        dpos_into(a, b, path, out);
        path.pop();
    }
}

/// Non-variable positions of `t` that are prefixes or extensions of `p`,
/// in lexicographic order.
pub fn npos(t: &Term, p: &Position) -> Result<Vec<Position>, TermError> {
    t.subterm_at(p)?;
    let mut out = Vec::new();
    // prefixes of p, root first
    for k in 0..p.len() {
        let q = Position(p.steps()[..k].to_vec());
        if !t.get(&q).expect("prefix of a valid position").is_var() {
            out.push(q);
        }
    }
    // p itself and everything below it
    let below = t.get(p).expect("checked above");
    for rel in below.positions() {
        if !below.get(&rel).expect("own position").is_var() {
            let mut steps = p.steps().to_vec();
            steps.extend_from_slice(rel.steps());
            out.push(Position(steps));
        }
    }
    Ok(out)
}
