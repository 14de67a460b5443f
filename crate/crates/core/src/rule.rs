//! Rewrite rules over plain symbols and `#`-rooted rules used by the
//! dependency-pair machinery.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::subst::Substitution;
use crate::term::{Term, Var, VarNames, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side {0} is a variable")]
    VariableLhs(String),
    #[error("variables {vars} of the right-hand side do not occur in the left-hand side")]
    UnboundRhsVars { vars: String },
    #[error("{0} is not rooted by a tuple symbol")]
    NotTupleRooted(String),
}

/// A rewrite rule `l → r` with `l ∉ V` and `Var(r) ⊆ Var(l)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::VariableLhs(lhs.to_string()));
        }
        let lvars = lhs.vars();
        let unbound: Vec<String> = rhs
            .vars()
            .into_iter()
            .filter(|v| !lvars.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !unbound.is_empty() {
            return Err(RuleError::UnboundRhsVars {
                vars: unbound.join(", "),
            });
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.lhs.vars()
    }

    /// A variant whose variables are all freshly drawn.
    pub fn rename_apart(&self, supply: &mut VarSupply) -> Rule {
        let mut renaming = BTreeMap::new();
        let mut fresh = |v: Var| *renaming.entry(v).or_insert_with(|| supply.fresh());
        Rule {
            lhs: self.lhs.map_vars(&mut fresh),
            rhs: self.rhs.map_vars(&mut fresh),
        }
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> impl fmt::Display + 'a {
        DisplayPair(&self.lhs, &self.rhs, names)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A rule between `#`-rooted terms, such as a dependency pair or an unfolded
/// version of one.
///
/// Unlike [`Rule`], the right-hand side may carry variables that the
/// left-hand side lacks: backward narrowing inserts left-hand sides of the
/// system whose extra variables need not reach the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FRule {
    lhs: Term,
    rhs: Term,
}

impl FRule {
    pub fn new(lhs: Term, rhs: Term) -> Result<FRule, RuleError> {
        for side in [&lhs, &rhs] {
            if !side.root().is_some_and(|s| s.is_tuple()) {
                return Err(if side.is_var() && std::ptr::eq(side, &lhs) {
                    RuleError::VariableLhs(side.to_string())
                } else {
                    RuleError::NotTupleRooted(side.to_string())
                });
            }
        }
        Ok(FRule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vars = self.lhs.vars();
        self.rhs.collect_vars(&mut vars);
        vars
    }

    /// `(l → r)θ`. Substitutions never touch the tuple roots.
    pub fn apply(&self, theta: &Substitution) -> FRule {
        FRule {
            lhs: theta.apply(&self.lhs),
            rhs: theta.apply(&self.rhs),
        }
    }

    /// Build from sides known to be `#`-rooted.
    pub(crate) fn from_parts(lhs: Term, rhs: Term) -> FRule {
        debug_assert!(lhs.root().is_some_and(|s| s.is_tuple()));
        debug_assert!(rhs.root().is_some_and(|s| s.is_tuple()));
        FRule { lhs, rhs }
    }

    /// A variant whose variables are all freshly drawn; `self` is unchanged.
    pub fn rename_apart(&self, supply: &mut VarSupply) -> FRule {
        let mut renaming = BTreeMap::new();
        self.rename_with(&mut |v| *renaming.entry(v).or_insert_with(|| supply.fresh()))
    }

    pub fn rename_with(&self, f: &mut impl FnMut(Var) -> Var) -> FRule {
        let lhs = self.lhs.map_vars(f);
        let rhs = self.rhs.map_vars(f);
        FRule { lhs, rhs }
    }

    pub fn shares_vars_with(&self, other: &FRule) -> bool {
        let mine = self.vars();
        other.vars().iter().any(|v| mine.contains(v))
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> impl fmt::Display + 'a {
        DisplayPair(&self.lhs, &self.rhs, names)
    }
}

impl fmt::Display for FRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

struct DisplayPair<'a>(&'a Term, &'a Term, &'a VarNames);

impl fmt::Display for DisplayPair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}",
            self.0.display(self.2),
            self.1.display(self.2)
        )
    }
}
