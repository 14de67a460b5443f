//! Semi-unification of a single inequation `s ≤ t`: find `θ1`, `θ2` with
//! `s θ1 θ2 = t θ1`.
//!
//! The decision works on a graph whose nodes are the subterms of `s` and `t`.
//! Two relations are closed over it:
//!
//! * `≡`, a congruence (kept in a union-find): nodes that `θ1` must make equal;
//! * `~`, a functional "instance" arrow on classes: `C ~ D` records
//!   `C θ1 θ2 = D θ1`, starting from `s ~ t`.
//!
//! Closure rules: two arrows out of one class force their targets equal; an
//! arrow out of a class with structure `f(c1..cn)` forces the target to have
//! structure `f(d1..dn)` with `ci ~ di`, creating that structure over fresh
//! variables when the target class has none.
//!
//! Failure is reported on a symbol clash, or on a cycle through arrows
//! (`|C θ1| ≤ |D θ1|`) and child-to-parent edges (strictly growing) that
//! contains at least one child edge. Such a cycle contradicts term sizes, and
//! it also covers the ordinary occurs check. When the closure is complete
//! without failure, `θ1` is read off the classes and `θ2` is recovered by
//! matching `s θ1` against `t θ1`.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::subst::{match_term, Substitution};
use crate::term::{Symbol, Term, Var, VarSupply};

/// A pair of witnesses for `s θ1 θ2 = t θ1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiUnifier {
    pub theta1: Substitution,
    pub theta2: Substitution,
}

/// Decide whether `s` semi-unifies with `t`. Fresh variables needed for `θ1`
/// are drawn above every variable of `s` and `t`.
pub fn semi_unify(s: &Term, t: &Term) -> Option<SemiUnifier> {
    let mut supply = VarSupply::above([s, t]);
    semi_unify_with(s, t, &mut supply)
}

/// As [`semi_unify`], drawing fresh variables from `supply`.
pub fn semi_unify_with(s: &Term, t: &Term, supply: &mut VarSupply) -> Option<SemiUnifier> {
    let mut graph = Closure::new(supply);
    let s_id = graph.intern(s);
    let t_id = graph.intern(t);
    graph.pending.push(Work::Arrow(s_id, t_id));
    graph.saturate().ok()?;

    let mut cache = HashMap::new();
    let mut vars = s.vars();
    t.collect_vars(&mut vars);
    let theta1: Substitution = vars
        .iter()
        .map(|&x| {
            let node = graph.var_nodes[&x];
            (x, graph.read_back(node, &mut cache))
        })
        .collect();

    let s1 = theta1.apply(s);
    let t1 = theta1.apply(t);
    let theta2 = match_term(&s1, &t1);
    debug_assert!(
        theta2.is_some(),
        "closure produced no instance for {s} ≤ {t}"
    );
    let theta2 = theta2?;
    debug_assert_eq!(theta2.apply(&s1), t1);
    Some(SemiUnifier { theta1, theta2 })
}

type NodeId = usize;

#[derive(Debug, Clone)]
enum Node {
    Var(Var),
    App(Symbol, Vec<NodeId>),
}

#[derive(Debug, Clone, Copy)]
enum Work {
    Same(NodeId, NodeId),
    Arrow(NodeId, NodeId),
}

#[derive(Debug)]
struct Fail;

struct Closure<'s> {
    nodes: Vec<Node>,
    parent: Vec<NodeId>,
    // per class representative
    structure: Vec<Option<NodeId>>,
    arrow: Vec<Option<NodeId>>,
    least_var: Vec<Option<Var>>,
    var_nodes: HashMap<Var, NodeId>,
    interned: HashMap<Term, NodeId>,
    pending: Vec<Work>,
    supply: &'s mut VarSupply,
    created: usize,
}

impl<'s> Closure<'s> {
    fn new(supply: &'s mut VarSupply) -> Self {
        Closure {
            nodes: Vec::new(),
            parent: Vec::new(),
            structure: Vec::new(),
            arrow: Vec::new(),
            least_var: Vec::new(),
            var_nodes: HashMap::new(),
            interned: HashMap::new(),
            pending: Vec::new(),
            supply,
            created: 0,
        }
    }

    fn push_node(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len();
        let (structure, least_var) = match &node {
            Node::Var(v) => (None, Some(*v)),
            Node::App(..) => (Some(id), None),
        };
        self.nodes.push(node);
        self.parent.push(id);
        self.structure.push(structure);
        self.arrow.push(None);
        self.least_var.push(least_var);
        id
    }

    fn intern(&mut self, t: &Term) -> NodeId {
        if let Some(&id) = self.interned.get(t) {
            return id;
        }
        let id = match t {
            Term::Var(v) => {
                let id = self.push_node(Node::Var(*v));
                self.var_nodes.insert(*v, id);
                id
            }
            Term::App(sym, args) => {
                let children = args.iter().map(|a| self.intern(a)).collect();
                self.push_node(Node::App(sym.clone(), children))
            }
        };
        self.interned.insert(t.clone(), id);
        id
    }

    fn find(&mut self, mut x: NodeId) -> NodeId {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: NodeId, b: NodeId) -> Result<(), Fail> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return Ok(());
        }
        self.parent[rb] = ra;
        match (self.structure[ra], self.structure[rb]) {
            (Some(na), Some(nb)) => {
                let (Node::App(fa, ca), Node::App(fb, cb)) = (&self.nodes[na], &self.nodes[nb])
                else {
                    unreachable!("structure nodes are applications")
                };
                if fa != fb {
                    return Err(Fail);
                }
                for (&x, &y) in ca.iter().zip(cb.iter()) {
                    self.pending.push(Work::Same(x, y));
                }
            }
            (None, Some(nb)) => self.structure[ra] = Some(nb),
            _ => {}
        }
        match (self.arrow[ra], self.arrow[rb]) {
            (Some(x), Some(y)) => self.pending.push(Work::Same(x, y)),
            (None, Some(y)) => self.arrow[ra] = Some(y),
            _ => {}
        }
        self.least_var[ra] = match (self.least_var[ra], self.least_var[rb]) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(())
    }

    fn add_arrow(&mut self, from: NodeId, to: NodeId) {
        let r = self.find(from);
        match self.arrow[r] {
            Some(existing) => self.pending.push(Work::Same(existing, to)),
            None => self.arrow[r] = Some(to),
        }
    }

    fn drain(&mut self) -> Result<(), Fail> {
        while let Some(work) = self.pending.pop() {
            match work {
                Work::Same(a, b) => self.union(a, b)?,
                Work::Arrow(a, b) => self.add_arrow(a, b),
            }
        }
        Ok(())
    }

    fn representatives(&mut self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.find(i) == i)
            .collect()
    }

    fn children_of(&self, structure: NodeId) -> (&Symbol, &[NodeId]) {
        match &self.nodes[structure] {
            Node::App(sym, children) => (sym, children),
            Node::Var(_) => unreachable!("structure nodes are applications"),
        }
    }

    /// Run the closure to completion, or fail.
    fn saturate(&mut self) -> Result<(), Fail> {
        // Size bound on created structure; only reachable if the cycle test
        // misses a divergent closure.
        let limit = 64 * self.nodes.len() * self.nodes.len() + 4096;
        loop {
            self.drain()?;

            let mut progressed = false;
            let mut unshaped: Option<(NodeId, NodeId)> = None;
            for c in self.representatives() {
                let (Some(sc), Some(target)) = (self.structure[c], self.arrow[c]) else {
                    continue;
                };
                let d = self.find(target);
                match self.structure[d] {
                    Some(sd) => {
                        let (fc, cc) = self.children_of(sc);
                        let (fd, cd) = self.children_of(sd);
                        if fc != fd {
                            return Err(Fail);
                        }
                        let pairs: Vec<(NodeId, NodeId)> =
                            cc.iter().copied().zip(cd.iter().copied()).collect();
                        for (x, y) in pairs {
                            let rx = self.find(x);
                            let already = match self.arrow[rx] {
                                Some(existing) => self.find(existing) == self.find(y),
                                None => false,
                            };
                            if !already {
                                self.pending.push(Work::Arrow(x, y));
                                progressed = true;
                            }
                        }
                    }
                    None => {
                        unshaped.get_or_insert((sc, d));
                    }
                }
            }
            if progressed {
                continue;
            }
            if self.has_size_cycle() {
                return Err(Fail);
            }
            let Some((shape, target)) = unshaped else {
                return Ok(());
            };
            if self.created > limit {
                log::warn!("semi-unification closure exceeded {limit} created nodes");
                return Err(Fail);
            }
            let (sym, children) = self.children_of(shape);
            let (sym, arity) = (sym.clone(), children.len());
            let fresh_children = (0..arity)
                .map(|_| {
                    let v = self.supply.fresh();
                    self.push_node(Node::Var(v))
                })
                .collect();
            let node = self.push_node(Node::App(sym, fresh_children));
            self.created += arity + 1;
            self.union(target, node)?;
        }
    }

    /// A cycle mixing arrows and child-to-parent edges, with at least one of the latter.
    fn has_size_cycle(&mut self) -> bool {
        let reps = self.representatives();
        let mut graph: DiGraph<(), bool> = DiGraph::new();
        let index: HashMap<NodeId, NodeIndex> =
            reps.iter().map(|&r| (r, graph.add_node(()))).collect();
        let mut strict_edges = Vec::new();
        for &r in &reps {
            if let Some(target) = self.arrow[r] {
                let d = self.find(target);
                graph.add_edge(index[&r], index[&d], false);
            }
            if let Some(sr) = self.structure[r] {
                let children: Vec<NodeId> = self.children_of(sr).1.to_vec();
                for child in children {
                    let cr = self.find(child);
                    if cr == r {
                        return true;
                    }
                    graph.add_edge(index[&cr], index[&r], true);
                    strict_edges.push((index[&cr], index[&r]));
                }
            }
        }
        if strict_edges.is_empty() {
            return false;
        }
        let mut component = vec![usize::MAX; graph.node_count()];
        for (i, scc) in tarjan_scc(&graph).into_iter().enumerate() {
            for n in scc {
                component[n.index()] = i;
            }
        }
        strict_edges
            .iter()
            .any(|(a, b)| component[a.index()] == component[b.index()])
    }

    fn read_back(&mut self, node: NodeId, cache: &mut HashMap<NodeId, Term>) -> Term {
        let r = self.find(node);
        if let Some(t) = cache.get(&r) {
            return t.clone();
        }
        let term = match self.structure[r] {
            Some(sr) => {
                let (sym, children) = self.children_of(sr);
                let (sym, children) = (sym.clone(), children.to_vec());
                let args: Vec<Term> = children.iter().map(|&c| self.read_back(c, cache)).collect();
                Term::app(sym, args)
            }
            None => Term::Var(self.least_var[r].expect("variable-only class has a variable")),
        };
        cache.insert(r, term.clone());
        term
    }
}
