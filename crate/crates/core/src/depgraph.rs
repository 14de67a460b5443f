//! Estimated dependency graph, its strongly connected components and simple
//! cycles, and the syntactic loops built from them.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::canon::{canonical_loop, canonical_rule, CanonicalLoop};
use crate::rule::FRule;
use crate::subst::mgu;
use crate::term::{Symbol, Term, VarNames, VarSupply};
use crate::trs::Trs;

/// Replace every outermost subterm whose root is in `defined` by a fresh variable.
pub fn cap(t: &Term, defined: &BTreeSet<Symbol>, supply: &mut VarSupply) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(sym, _) if defined.contains(sym) => Term::Var(supply.fresh()),
        Term::App(sym, args) => Term::app(
            sym.clone(),
            args.iter()
                .map(|a| cap(a, defined, supply))
                .collect::<Vec<_>>(),
        ),
    }
}

/// Replace every variable occurrence by its own fresh variable.
pub fn ren(t: &Term, supply: &mut VarSupply) -> Term {
    match t {
        Term::Var(_) => Term::Var(supply.fresh()),
        Term::App(sym, args) => Term::app(
            sym.clone(),
            args.iter().map(|a| ren(a, supply)).collect::<Vec<_>>(),
        ),
    }
}

/// Does `ren(cap(rhs a))` unify with `lhs b`?
pub fn connectable(a: &FRule, b: &FRule, defined: &BTreeSet<Symbol>) -> bool {
    // every variable of ren(cap(..)) is fresh, hence apart from b
    let mut supply = VarSupply::above([b.lhs()]);
    let abstracted = ren(&cap(a.rhs(), defined, &mut supply), &mut supply);
    mgu(&abstracted, b.lhs()).is_some()
}

/// Caps on simple-cycle enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleLimits {
    pub max_count: usize,
    pub max_len: usize,
}

impl Default for CycleLimits {
    fn default() -> Self {
        CycleLimits {
            max_count: 5000,
            max_len: 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DepGraph {
    nodes: Vec<FRule>,
    arcs: BTreeSet<(usize, usize)>,
    succ: Vec<Vec<usize>>,
}

impl DepGraph {
    pub fn build(trs: &Trs) -> DepGraph {
        let defined = trs.defined_symbols();
        DepGraph::from_pairs(trs.dependency_pairs(), &defined)
    }

    pub fn from_pairs(nodes: Vec<FRule>, defined: &BTreeSet<Symbol>) -> DepGraph {
        let mut arcs = BTreeSet::new();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate() {
                if connectable(a, b, defined) {
                    arcs.insert((i, j));
                    succ[i].push(j);
                }
            }
        }
        DepGraph { nodes, arcs, succ }
    }

    pub fn nodes(&self) -> &[FRule] {
        &self.nodes
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.contains(&(from, to))
    }

    /// Components with at least one internal arc, each sorted, ordered by
    /// their least node.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let ids: Vec<_> = self.nodes.iter().map(|_| g.add_node(())).collect();
        for &(i, j) in &self.arcs {
            g.add_edge(ids[i], ids[j], ());
        }
        let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || self.has_arc(c[0], c[0]))
            .collect();
        out.sort();
        out
    }

    /// Simple cycles of `component`, each starting at its least node;
    /// shortest first, then lexicographic.
    pub fn simple_cycles(&self, component: &[usize], limits: CycleLimits) -> Vec<Vec<usize>> {
        let members: BTreeSet<usize> = component.iter().copied().collect();
        let mut out = Vec::new();
        for len in 1..=limits.max_len {
            for &start in &members {
                if out.len() >= limits.max_count {
                    return out;
                }
                // only nodes above the start, so each cycle is found once
                let allowed: BTreeSet<usize> = members.range(start..).copied().collect();
                let dist = self.distance_to(start, &allowed);
                let mut path = vec![start];
                let mut on_path = HashSet::from([start]);
                self.extend_cycle(
                    &allowed,
                    &dist,
                    len,
                    &mut path,
                    &mut on_path,
                    &mut out,
                    limits.max_count,
                );
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_cycle(
        &self,
        allowed: &BTreeSet<usize>,
        dist: &[Option<usize>],
        len: usize,
        path: &mut Vec<usize>,
        on_path: &mut HashSet<usize>,
        out: &mut Vec<Vec<usize>>,
        max_count: usize,
    ) {
        let last = *path.last().expect("nonempty path");
        let start = path[0];
        for &next in &self.succ[last] {
            if out.len() >= max_count {
                return;
            }
            if next == start && path.len() == len {
                out.push(path.clone());
                continue;
            }
            if !allowed.contains(&next) || on_path.contains(&next) || path.len() >= len {
                continue;
            }
            match dist[next] {
                Some(d) if path.len() + d <= len => {}
                _ => continue,
            }
            path.push(next);
            on_path.insert(next);
            self.extend_cycle(allowed, dist, len, path, on_path, out, max_count);
            on_path.remove(&next);
            path.pop();
        }
    }

    /// Length of the shortest path from each node to `target` inside `allowed`.
    fn distance_to(&self, target: usize, allowed: &BTreeSet<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[target] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(n) = queue.pop_front() {
            let d = dist[n].expect("queued nodes have a distance");
            for &m in allowed {
                if dist[m].is_none() && self.has_arc(m, n) {
                    dist[m] = Some(d + 1);
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// One `i -> j` line per arc.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in &self.arcs {
            out.push_str(&format!("{i} -> {j}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("a loop has at least one rule")]
    Empty,
    #[error("rules {0} and {1} are variants of each other")]
    Duplicate(usize, usize),
    #[error("rules {0} and {1} share variables")]
    SharedVariables(usize, usize),
    #[error("rule {0} is not connectable to rule {1}")]
    NotConnectable(usize, usize),
}

/// A nonempty sequence of distinct, pairwise variable-disjoint `#`-rules, each
/// connectable to its cyclic successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntacticLoop {
    rules: Vec<FRule>,
}

impl SyntacticLoop {
    pub fn new(rules: Vec<FRule>, defined: &BTreeSet<Symbol>) -> Result<SyntacticLoop, LoopError> {
        validate_loop(&rules, defined)?;
        Ok(SyntacticLoop { rules })
    }

    /// Skip validation; callers vouch for the invariants.
    pub(crate) fn new_unchecked(rules: Vec<FRule>) -> SyntacticLoop {
        debug_assert!(!rules.is_empty());
        SyntacticLoop { rules }
    }

    /// The loop along `cycle`; every rule but the first is renamed apart.
    pub fn from_cycle(graph: &DepGraph, cycle: &[usize], supply: &mut VarSupply) -> SyntacticLoop {
        let rules = cycle
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let rule = &graph.nodes()[i];
                if k == 0 {
                    rule.clone()
                } else {
                    rule.rename_apart(supply)
                }
            })
            .collect();
        SyntacticLoop { rules }
    }

    pub fn rules(&self) -> &[FRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.rules.len() == 1
    }

    pub fn canonical_form(&self) -> CanonicalLoop {
        canonical_loop(&self.rules)
    }

    pub fn validate(&self, defined: &BTreeSet<Symbol>) -> Result<(), LoopError> {
        validate_loop(&self.rules, defined)
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> impl fmt::Display + 'a {
        LoopDisplay(self, names)
    }
}

struct LoopDisplay<'a>(&'a SyntacticLoop, &'a VarNames);

impl fmt::Display for LoopDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.0.rules.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", r.display(self.1))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for SyntacticLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        LoopDisplay(self, &VarNames::new()).fmt(f)
    }
}

pub fn validate_loop(rules: &[FRule], defined: &BTreeSet<Symbol>) -> Result<(), LoopError> {
    if rules.is_empty() {
        return Err(LoopError::Empty);
    }
    let forms: Vec<_> = rules.iter().map(canonical_rule).collect();
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if forms[i] == forms[j] {
                return Err(LoopError::Duplicate(i, j));
            }
            if rules[i].shares_vars_with(&rules[j]) {
                return Err(LoopError::SharedVariables(i, j));
            }
        }
    }
    for i in 0..rules.len() {
        let j = (i + 1) % rules.len();
        if !connectable(&rules[i], &rules[j], defined) {
            return Err(LoopError::NotConnectable(i, j));
        }
    }
    Ok(())
}

/// All syntactic loops from the simple cycles of every component, in
/// component order. Loops already seen modulo renaming and rotation are skipped.
pub fn initial_loops(
    graph: &DepGraph,
    limits: CycleLimits,
    supply: &mut VarSupply,
) -> Vec<SyntacticLoop> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for component in graph.sccs() {
        for cycle in graph.simple_cycles(&component, limits) {
            let lp = SyntacticLoop::from_cycle(graph, &cycle, supply);
            if seen.insert(lp.canonical_form()) {
                out.push(lp);
            }
        }
    }
    out
}
