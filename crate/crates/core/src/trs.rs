//! Term rewrite systems: defined symbols, dependency pairs and one-step rewriting.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::rule::{FRule, Rule};
use crate::subst::match_term;
use crate::term::{Position, Symbol, Term, VarNames, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("symbol {name} is used with arities {first} and {second}")]
    ArityMismatch {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("tuple symbol {0} may not occur in a rewrite system")]
    TupleSymbol(String),
}

/// A finite, ordered set of rewrite rules over plain symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trs {
    rules: Vec<Rule>,
    signature: BTreeSet<Symbol>,
    var_names: VarNames,
}

/// One rewrite step `t →[rule @ position] term`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub position: Position,
    /// Index into [`Trs::rules`], 0-based.
    pub rule: usize,
    pub term: Term,
}

impl Trs {
    pub fn new(rules: Vec<Rule>) -> Result<Trs, TrsError> {
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        let mut signature = BTreeSet::new();
        for rule in &rules {
            for side in [rule.lhs(), rule.rhs()] {
                collect_symbols(side, &mut |sym| {
                    if sym.is_tuple() {
                        return Err(TrsError::TupleSymbol(sym.to_string()));
                    }
                    match arities.get(sym.name()) {
                        Some(&first) if first != sym.arity() => Err(TrsError::ArityMismatch {
                            name: sym.name().to_string(),
                            first,
                            second: sym.arity(),
                        }),
                        Some(_) => Ok(()),
                        None => {
                            arities.insert(sym.name().to_string(), sym.arity());
                            signature.insert(sym.clone());
                            Ok(())
                        }
                    }
                })?;
            }
        }
        Ok(Trs {
            rules,
            signature,
            var_names: VarNames::new(),
        })
    }

    /// Attach display names for the variables of the rules.
    pub fn with_var_names(mut self, names: VarNames) -> Trs {
        self.var_names = names;
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &BTreeSet<Symbol> {
        &self.signature
    }

    pub fn var_names(&self) -> &VarNames {
        &self.var_names
    }

    /// A supply whose variables are disjoint from every variable of the rules.
    pub fn var_supply(&self) -> VarSupply {
        VarSupply::above(self.rules.iter().flat_map(|r| [r.lhs(), r.rhs()]))
    }

    /// Root symbols of the left-hand sides.
    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules
            .iter()
            .filter_map(|r| r.lhs().root().cloned())
            .collect()
    }

    /// Dependency pairs in rule order, then position order in the right-hand
    /// side. Pairs that are variants of an earlier one are dropped.
    pub fn dependency_pairs(&self) -> Vec<FRule> {
        let defined = self.defined_symbols();
        let mut seen = HashSet::new();
        let mut pairs = Vec::new();
        for rule in &self.rules {
            let lhs = rule.lhs().mark_root().expect("lhs is not a variable");
            for p in rule.rhs().positions() {
                let sub = rule.rhs().get(&p).expect("own position");
                if !sub.root().is_some_and(|s| defined.contains(s)) {
                    continue;
                }
                let pair = FRule::from_parts(lhs.clone(), sub.mark_root().expect("application"));
                if seen.insert(pair.canonical_form()) {
                    pairs.push(pair);
                }
            }
        }
        pairs
    }

    /// All one-step rewrites of `t`, by position (lexicographic) then rule index.
    pub fn successors(&self, t: &Term) -> Vec<Step> {
        let mut out = Vec::new();
        for p in t.positions() {
            let sub = t.get(&p).expect("own position");
            if sub.is_var() {
                continue;
            }
            for (i, rule) in self.rules.iter().enumerate() {
                if let Some(theta) = match_term(rule.lhs(), sub) {
                    let term = t
                        .replace_at(&p, theta.apply(rule.rhs()))
                        .expect("own position");
                    out.push(Step {
                        position: p.clone(),
                        rule: i,
                        term,
                    });
                }
            }
        }
        out
    }
}

fn collect_symbols(
    t: &Term,
    visit: &mut impl FnMut(&Symbol) -> Result<(), TrsError>,
) -> Result<(), TrsError> {
    if let Term::App(sym, args) = t {
        visit(sym)?;
        for a in args.iter() {
            collect_symbols(a, visit)?;
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::term::tests::{c, f, pos, v};

    pub fn rule(l: Term, r: Term) -> Rule {
        Rule::new(l, r).unwrap()
    }

    pub fn marked(name: &str, args: Vec<Term>) -> Term {
        f(name, args).mark_root().unwrap()
    }

    /// f(s(0),s(1),x) → f(x,x,x), h → 0, h → 1
    pub fn toyama() -> Trs {
        let x = v(0);
        Trs::new(vec![
            rule(
                f(
                    "f",
                    vec![f("s", vec![c("0")]), f("s", vec![c("1")]), x.clone()],
                ),
                f("f", vec![x.clone(), x.clone(), x]),
            ),
            rule(c("h"), c("0")),
            rule(c("h"), c("1")),
        ])
        .unwrap()
    }

    /// f(0) → f(1), f(2) → f(0), 1 → 0
    pub fn r_prime() -> Trs {
        Trs::new(vec![
            rule(f("f", vec![c("0")]), f("f", vec![c("1")])),
            rule(f("f", vec![c("2")]), f("f", vec![c("0")])),
            rule(c("1"), c("0")),
        ])
        .unwrap()
    }

    #[test]
    fn defined_symbols_examples() {
        let names = |r: &Trs| -> Vec<String> {
            r.defined_symbols()
                .iter()
                .map(|s| s.name().to_string())
                .collect()
        };
        assert_eq!(names(&toyama()), ["f", "h"]);
        assert_eq!(names(&r_prime()), ["1", "f"]);
        assert!(Trs::new(vec![]).unwrap().defined_symbols().is_empty());
    }

    #[test]
    fn dependency_pairs_examples() {
        let x = v(0);
        assert_eq!(
            toyama().dependency_pairs(),
            [FRule::new(
                marked(
                    "f",
                    vec![f("s", vec![c("0")]), f("s", vec![c("1")]), x.clone()]
                ),
                marked("f", vec![x.clone(), x.clone(), x]),
            )
            .unwrap()]
        );
        let none = Trs::new(vec![rule(c("0"), c("1"))]).unwrap();
        assert!(none.dependency_pairs().is_empty());
        let dps: Vec<String> = r_prime()
            .dependency_pairs()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(dps, ["f#(0) -> f#(1)", "f#(0) -> 1#", "f#(2) -> f#(0)"]);
    }

    #[test]
    fn duplicate_pairs_are_dropped() {
        // f(x) → g(f(x), f(x)) yields f#(x) → f#(x) once
        let x = v(0);
        let r = Trs::new(vec![rule(
            f("f", vec![x.clone()]),
            f("g", vec![f("f", vec![x.clone()]), f("f", vec![x])]),
        )])
        .unwrap();
        assert_eq!(r.dependency_pairs().len(), 1);
    }

    #[test]
    fn successors_examples() {
        let sh = f("s", vec![c("h")]);
        let t = f("f", vec![sh.clone(), sh.clone(), sh.clone()]);
        let steps = toyama().successors(&t);
        let expected = f("f", vec![f("s", vec![c("0")]), sh.clone(), sh]);
        assert!(steps
            .iter()
            .any(|s| s.position == pos("1.1") && s.rule == 1 && s.term == expected));
        assert_eq!(steps.len(), 6);

        assert!(toyama().successors(&v(3)).is_empty());
        let r = Trs::new(vec![rule(c("0"), c("1"))]).unwrap();
        assert_eq!(
            r.successors(&c("0")),
            [Step {
                position: Position::root(),
                rule: 0,
                term: c("1")
            }]
        );
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let err = Trs::new(vec![rule(
            f("f", vec![c("a")]),
            f("f", vec![c("a"), c("a")]),
        )]);
        assert!(matches!(err, Err(TrsError::ArityMismatch { .. })));
    }
}
