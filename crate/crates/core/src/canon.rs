//! Canonical representatives of rules and loops modulo variable renaming.

use std::collections::HashMap;

use crate::rule::FRule;
use crate::term::{Term, Var};

/// An [`FRule`] with variables renumbered `v0, v1, …` in order of first
/// occurrence (left-hand side, then right-hand side).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalRule {
    lhs: Term,
    rhs: Term,
}

impl CanonicalRule {
    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }
}

/// A loop's rules as a sorted list of canonical rules. Loops made of the same
/// rules modulo renaming, in any order, have equal canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalLoop(Vec<CanonicalRule>);

impl CanonicalLoop {
    pub fn rules(&self) -> &[CanonicalRule] {
        &self.0
    }
}

pub fn canonical_rule(rule: &FRule) -> CanonicalRule {
    let mut numbering: HashMap<Var, Var> = HashMap::new();
    let mut renumber = |v: Var| {
        let next = Var(numbering.len() as u32);
        *numbering.entry(v).or_insert(next)
    };
    let renamed = rule.rename_with(&mut renumber);
    CanonicalRule {
        lhs: renamed.lhs().clone(),
        rhs: renamed.rhs().clone(),
    }
}

pub fn canonical_loop(rules: &[FRule]) -> CanonicalLoop {
    let mut forms: Vec<CanonicalRule> = rules.iter().map(canonical_rule).collect();
    forms.sort();
    CanonicalLoop(forms)
}

/// Are two rules variants of each other?
pub fn is_variant(a: &FRule, b: &FRule) -> bool {
    canonical_rule(a) == canonical_rule(b)
}

impl FRule {
    pub fn canonical_form(&self) -> CanonicalRule {
        canonical_rule(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::tests::{c, f, sym, v};

    fn marked(name: &str, args: Vec<Term>) -> Term {
        Term::app(sym(name, args.len()).marked().unwrap(), args)
    }

    fn n(x: u32) -> FRule {
        let x = v(x);
        FRule::new(
            marked("f", vec![x.clone(), x.clone()]),
            marked("f", vec![f("g", vec![x.clone()]), f("h", vec![x])]),
        )
        .unwrap()
    }

    #[test]
    fn variants_coincide() {
        assert_eq!(canonical_rule(&n(0)), canonical_rule(&n(5)));
        assert!(is_variant(&n(1), &n(9)));
    }

    #[test]
    fn distinct_ground_rules_differ() {
        let a = FRule::new(marked("h", vec![]), marked("0", vec![])).unwrap();
        let b = FRule::new(marked("h", vec![]), marked("1", vec![])).unwrap();
        assert_ne!(canonical_rule(&a), canonical_rule(&b));
    }

    #[test]
    fn loop_order_is_irrelevant() {
        let n1 = FRule::new(marked("f", vec![c("0")]), marked("f", vec![c("1")])).unwrap();
        let n2 = FRule::new(marked("f", vec![c("2")]), marked("f", vec![c("0")])).unwrap();
        assert_eq!(
            canonical_loop(&[n1.clone(), n2.clone()]),
            canonical_loop(&[n2, n1])
        );
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let form = canonical_rule(&n(4));
        let again = FRule::new(form.lhs().clone(), form.rhs().clone()).unwrap();
        assert_eq!(canonical_rule(&again), form);
    }
}
