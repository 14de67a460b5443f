//! Brute-force oracles and generators shared by the property and acceptance
//! suites. Nothing here calls the unification or semi-unification code under
//! test; substitutions are applied and matched by hand.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use loopfinder::{Symbol, Term, Var};
use rand::Rng;

pub const X: Var = Var(0);
pub const Y: Var = Var(1);
/// Extra variable available to the oracles only.
pub const Z: Var = Var(2);

/// The three-symbol signature used by the random suites.
pub fn signature() -> Vec<Symbol> {
    vec![
        Symbol::new("a", 0),
        Symbol::new("g", 1),
        Symbol::new("f", 2),
    ]
}

/// Random term of depth at most `depth` (a variable or constant has depth 1)
/// over [`signature`] and the variables `vars`.
pub fn random_term(rng: &mut impl Rng, depth: usize, vars: &[Var]) -> Term {
    let sig = signature();
    if depth <= 1 || rng.gen_bool(0.3) {
        let pick = rng.gen_range(0..vars.len() + 1);
        return if pick == vars.len() {
            Term::constant("a")
        } else {
            Term::Var(vars[pick])
        };
    }
    let sym = sig[rng.gen_range(1..sig.len())].clone();
    let args: Vec<Term> = (0..sym.arity())
        .map(|_| random_term(rng, depth - 1, vars))
        .collect();
    Term::app(sym, args)
}

/// Every term of depth at most `depth` over [`signature`] and `vars`.
pub fn all_terms(depth: usize, vars: &[Var]) -> Vec<Term> {
    let mut atoms: Vec<Term> = vars.iter().map(|&v| Term::Var(v)).collect();
    atoms.push(Term::constant("a"));
    let mut level = atoms.clone();
    for _ in 1..depth {
        let mut next = atoms.clone();
        for sym in signature().into_iter().filter(|s| s.arity() > 0) {
            match sym.arity() {
                1 => next.extend(
                    level
                        .iter()
                        .map(|t| Term::app(sym.clone(), vec![t.clone()])),
                ),
                2 => {
                    for a in &level {
                        for b in &level {
                            next.push(Term::app(sym.clone(), vec![a.clone(), b.clone()]));
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        level = next;
    }
    level
}

pub fn vars_of(terms: &[&Term]) -> Vec<Var> {
    let mut out = BTreeSet::new();
    for t in terms {
        collect(t, &mut out);
    }
    out.into_iter().collect()
}

fn collect(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(*v);
        }
        Term::App(_, args) => args.iter().for_each(|a| collect(a, out)),
    }
}

pub type Bindings = BTreeMap<Var, Term>;

pub fn apply(t: &Term, b: &Bindings) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(sym, args) => Term::app(
            sym.clone(),
            args.iter().map(|a| apply(a, b)).collect::<Vec<_>>(),
        ),
    }
}

/// Naive one-way matching: extend `b` so that `pattern b = target`.
pub fn instance_of(pattern: &Term, target: &Term, b: &mut Bindings) -> bool {
    match pattern {
        Term::Var(v) => match b.get(v) {
            Some(bound) => bound == target,
            None => {
                b.insert(*v, target.clone());
                true
            }
        },
        Term::App(f, fa) => match target {
            Term::App(g, ga) if f == g => {
                fa.iter().zip(ga.iter()).all(|(p, t)| instance_of(p, t, b))
            }
            _ => false,
        },
    }
}

/// Call `visit` with every assignment of `vars` to elements of `range`;
/// stops early when `visit` returns true.
pub fn for_each_assignment(
    vars: &[Var],
    range: &[Term],
    visit: &mut impl FnMut(&Bindings) -> bool,
) -> bool {
    fn go(
        vars: &[Var],
        range: &[Term],
        acc: &mut Bindings,
        visit: &mut impl FnMut(&Bindings) -> bool,
    ) -> bool {
        match vars.split_first() {
            None => visit(acc),
            Some((v, rest)) => {
                for t in range {
                    acc.insert(*v, t.clone());
                    if go(rest, range, acc, visit) {
                        return true;
                    }
                }
                acc.remove(v);
                false
            }
        }
    }
    go(vars, range, &mut Bindings::new(), visit)
}

/// Does some `θ1` over terms of depth ≤ `depth` (with `θ2` found by matching)
/// satisfy `s θ1 θ2 = t θ1`?
pub fn oracle_semi_unifiable(s: &Term, t: &Term, depth: usize) -> bool {
    let vars = vars_of(&[s, t]);
    let mut range_vars = vars.clone();
    // one variable outside the pair, for witnesses that need a fresh one
    let fresh = Var(vars.iter().map(|v| v.0 + 1).max().unwrap_or(0).max(Z.0));
    range_vars.push(fresh);
    let range = all_terms(depth, &range_vars);
    for_each_assignment(&vars, &range, &mut |theta1| {
        let s1 = apply(s, theta1);
        let t1 = apply(t, theta1);
        instance_of(&s1, &t1, &mut Bindings::new())
    })
}

/// All unifiers of `s` and `t` with range in `range`, over the pair's variables.
pub fn brute_force_unifiers(s: &Term, t: &Term, range: &[Term]) -> Vec<Bindings> {
    let vars = vars_of(&[s, t]);
    let mut out = Vec::new();
    for_each_assignment(&vars, range, &mut |sigma| {
        if apply(s, sigma) == apply(t, sigma) {
            out.push(sigma.clone());
        }
        false
    });
    out
}

/// Is `sigma = theta δ` on `vars` for some δ?
pub fn is_instance_of_substitution(theta: &Bindings, sigma: &Bindings, vars: &[Var]) -> bool {
    let mut delta = Bindings::new();
    vars.iter().all(|v| {
        let through_theta = theta.get(v).cloned().unwrap_or(Term::Var(*v));
        let target = sigma.get(v).cloned().unwrap_or(Term::Var(*v));
        instance_of(&through_theta, &target, &mut delta)
    })
}
