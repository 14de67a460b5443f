//! Substitutions, syntactic unification and matching.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Term, Var, VarNames};

/// A finite map from variables to terms. Identity bindings are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Bind `v ↦ t`; a binding `v ↦ v` removes `v` from the domain.
    pub fn bind(&mut self, v: Var, t: Term) {
        if t == Term::Var(v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.map.keys().copied()
    }

    /// `tθ`: simultaneous replacement of every bound variable.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        self.apply_inner(t).unwrap_or_else(|| t.clone())
    }

    // None means "unchanged", which lets untouched subterms keep their sharing.
    fn apply_inner(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(v) => self.map.get(v).cloned(),
            Term::App(sym, args) => {
                let mut changed: Option<Vec<Term>> = None;
                for (i, arg) in args.iter().enumerate() {
                    if let Some(new) = self.apply_inner(arg) {
                        changed.get_or_insert_with(|| args.to_vec())[i] = new;
                    }
                }
                changed.map(|new_args| Term::App(sym.clone(), new_args.into()))
            }
        }
    }

    /// `self` followed by `other`: `t(self.then(other)) = (t self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::identity();
        for (v, t) in &self.map {
            out.bind(*v, other.apply(t));
        }
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                out.bind(*v, t.clone());
            }
        }
        out
    }

    /// `θθ = θ`.
    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.apply(t) == *t)
    }

    pub fn restrict(&self, vars: impl IntoIterator<Item = Var>) -> Substitution {
        let mut out = Substitution::identity();
        for v in vars {
            if let Some(t) = self.map.get(&v) {
                out.map.insert(v, t.clone());
            }
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> SubstDisplay<'a> {
        SubstDisplay {
            subst: self,
            names: Some(names),
        }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::identity();
        for (v, t) in iter {
            s.bind(v, t);
        }
        s
    }
}

pub struct SubstDisplay<'a> {
    subst: &'a Substitution,
    names: Option<&'a VarNames>,
}

impl fmt::Display for SubstDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let empty = VarNames::new();
        let names = self.names.unwrap_or(&empty);
        write!(f, "{{")?;
        for (i, (v, t)) in self.subst.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}/{}", Term::Var(*v).display(names), t.display(names))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        SubstDisplay {
            subst: self,
            names: None,
        }
        .fmt(f)
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn mgu(s: &Term, t: &Term) -> Option<Substitution> {
    let mut theta = Substitution::identity();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = theta.apply(&a);
        let b = theta.apply(&b);
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(*x) {
                    return None;
                }
                // keep θ in solved form: eliminate x from existing ranges
                let elim: Substitution = std::iter::once((*x, other.clone())).collect();
                for range in theta.map.values_mut() {
                    *range = elim.apply(range);
                }
                theta.map.insert(*x, other.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                for (x, y) in fa.iter().zip(ga.iter()) {
                    stack.push((x.clone(), y.clone()));
                }
            }
        }
    }
    Some(theta)
}

/// Unify several pairs at once.
pub fn mgu_all<'a>(pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>) -> Option<Substitution> {
    let (left, right): (Vec<Term>, Vec<Term>) = pairs
        .into_iter()
        .map(|(a, b)| (a.clone(), b.clone()))
        .unzip();
    let sym = crate::term::Symbol::new("<tuple>", left.len());
    mgu(&Term::app(sym.clone(), left), &Term::app(sym, right))
}

/// Matching: a `θ` with `lθ = t`, binding only variables of `l`.
pub fn match_term(l: &Term, t: &Term) -> Option<Substitution> {
    let mut bindings = BTreeMap::new();
    if !match_into(l, t, &mut bindings) {
        return None;
    }
    // x ↦ x is kept while matching so later occurrences stay consistent
    Some(bindings.into_iter().collect())
}

/// Match several pattern/term pairs with one shared substitution.
pub fn match_all<'a>(
    pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>,
) -> Option<Substitution> {
    let mut bindings = BTreeMap::new();
    for (l, t) in pairs {
        if !match_into(l, t, &mut bindings) {
            return None;
        }
    }
    Some(bindings.into_iter().collect())
}

fn match_into(l: &Term, t: &Term, bindings: &mut BTreeMap<Var, Term>) -> bool {
    match (l, t) {
        (Term::Var(x), _) => match bindings.get(x) {
            Some(bound) => bound == t,
            None => {
                bindings.insert(*x, t.clone());
                true
            }
        },
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g
                && fa
                    .iter()
                    .zip(ga.iter())
                    .all(|(a, b)| match_into(a, b, bindings))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}
