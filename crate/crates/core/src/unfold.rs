//! Guided unfolding of syntactic loops.
//!
//! Loops are narrowed and instantiated at disagreement positions between a
//! rule's right-hand side and its successor's left-hand side, and adjacent
//! rules are merged once their interface unifies, until singletons emerge.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::trace;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_rule, CanonicalLoop, CanonicalRule};
use crate::depgraph::{
    connectable, initial_loops, validate_loop, CycleLimits, DepGraph, SyntacticLoop,
};
use crate::rule::FRule;
use crate::subst::mgu;
use crate::term::{dpos, npos, Position, Symbol, Term, VarSupply};
use crate::trs::Trs;

/// Which disagreement positions are unfolded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Every disagreement position.
    All,
    /// The leftmost one.
    Lm,
    /// The leftmost one with some unfolding.
    Lmne,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::All => "all",
            Strategy::Lm => "lm",
            Strategy::Lmne => "lmne",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Strategy::All),
            "lm" => Ok(Strategy::Lm),
            "lmne" => Ok(Strategy::Lmne),
            other => Err(format!(
                "unknown strategy {other} (expected all, lm or lmne)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnfoldBudget {
    /// `None` disables the wall clock, which keeps runs reproducible.
    pub time_limit: Option<Duration>,
    pub max_iterations: Option<usize>,
    pub max_generated: usize,
}

impl Default for UnfoldBudget {
    fn default() -> Self {
        UnfoldBudget {
            time_limit: Some(Duration::from_secs(120)),
            max_iterations: None,
            max_generated: 10_000_000,
        }
    }
}

impl UnfoldBudget {
    /// Iteration-bounded and clock-free.
    pub fn iterations(n: usize) -> Self {
        UnfoldBudget {
            time_limit: None,
            max_iterations: Some(n),
            max_generated: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The callback accepted a loop.
    Found,
    FrontierEmpty,
    TimeLimit,
    IterationLimit,
    GeneratedLimit,
}

impl StopReason {
    pub fn is_budget(self) -> bool {
        matches!(
            self,
            StopReason::TimeLimit | StopReason::IterationLimit | StopReason::GeneratedLimit
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationReport {
    /// Number of unfolding rounds started; 0 when the answer came from the
    /// simple cycles themselves.
    pub iterations: usize,
    /// Distinct loops produced, simple cycles included.
    pub generated: usize,
    pub frontier_empty: bool,
    pub stop: StopReason,
    pub found_at: Option<usize>,
}

/// Unfoldings at one position, split by origin.
#[derive(Debug, Clone, Default)]
struct Unfoldings {
    forward: Vec<FRule>,
    backward: Vec<FRule>,
}

impl Unfoldings {
    fn is_empty(&self) -> bool {
        self.forward.is_empty() && self.backward.is_empty()
    }
}

fn push_distinct(out: &mut Vec<FRule>, seen: &mut HashSet<CanonicalRule>, rule: FRule) {
    if seen.insert(canonical_rule(&rule)) {
        out.push(rule);
    }
}

/// Root symbols differ, so no renaming of `b` unifies with `a`.
fn clashes(a: &Term, b: &Term) -> bool {
    matches!((a.root(), b.root()), (Some(f), Some(g)) if f != g)
}

/// Forward unfoldings of `rule` at `p`, guided by `guide`.
///
/// `p` must be a disagreement position of the rule's right-hand side and
/// `guide`. Instantiations at prefixes of `p` come first, then narrowing
/// with each rule of `trs`, position-major.
pub fn forward_unfold(
    rule: &FRule,
    guide: &Term,
    p: &Position,
    trs: &Trs,
    supply: &mut VarSupply,
) -> Vec<FRule> {
    let (l, r) = (rule.lhs(), rule.rhs());
    debug_assert!(
        dpos(r, guide).contains(p),
        "{p} is not a disagreement position"
    );
    let qs = npos(r, p).expect("p is a position of the right-hand side");
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for q in qs.iter().filter(|q| q.is_prefix_of(p)) {
        let guide_at = guide.get(q).expect("prefix of a position of the guide");
        if let Some(theta) = mgu(r.get(q).expect("own position"), guide_at) {
            push_distinct(&mut out, &mut seen, rule.apply(&theta));
        }
    }
    for q in &qs {
        let sub = r.get(q).expect("own position");
        for (k, base) in trs.rules().iter().enumerate() {
            if clashes(sub, base.lhs()) {
                continue;
            }
            let fresh = base.rename_apart(supply);
            if let Some(theta) = mgu(sub, fresh.lhs()) {
                let narrowed = r.replace_at(q, fresh.rhs().clone()).expect("own position");
                trace!("forward narrowing at {q} with rule {}", k + 1);
                let u = FRule::from_parts(theta.apply(l), theta.apply(&narrowed));
                push_distinct(&mut out, &mut seen, u);
            }
        }
    }
    out
}

/// Backward unfoldings of `rule` at `p`, guided by `guide`.
///
/// `p` must be a disagreement position of `guide` and the rule's left-hand
/// side.
pub fn backward_unfold(
    rule: &FRule,
    guide: &Term,
    p: &Position,
    trs: &Trs,
    supply: &mut VarSupply,
) -> Vec<FRule> {
    let (s, t) = (rule.lhs(), rule.rhs());
    debug_assert!(
        dpos(guide, s).contains(p),
        "{p} is not a disagreement position"
    );
    let qs = npos(s, p).expect("p is a position of the left-hand side");
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for q in qs.iter().filter(|q| q.is_prefix_of(p)) {
        let guide_at = guide.get(q).expect("prefix of a position of the guide");
        if let Some(theta) = mgu(guide_at, s.get(q).expect("own position")) {
            push_distinct(&mut out, &mut seen, rule.apply(&theta));
        }
    }
    // the tuple root is never narrowed: a collapsing rule would bind its
    // variable to a marked term
    for q in qs.iter().filter(|q| !q.is_root()) {
        let sub = s.get(q).expect("own position");
        for (k, base) in trs.rules().iter().enumerate() {
            if clashes(sub, base.rhs()) {
                continue;
            }
            let fresh = base.rename_apart(supply);
            if let Some(theta) = mgu(sub, fresh.rhs()) {
                let narrowed = s.replace_at(q, fresh.lhs().clone()).expect("own position");
                trace!("backward narrowing at {q} with rule {}", k + 1);
                let u = FRule::from_parts(theta.apply(&narrowed), theta.apply(t));
                push_distinct(&mut out, &mut seen, u);
            }
        }
    }
    out
}

/// Selected positions with their unfoldings, for a window `first`, `second`.
fn selected_unfoldings(
    strategy: Strategy,
    first: &FRule,
    second: &FRule,
    trs: &Trs,
    supply: &mut VarSupply,
) -> Vec<(Position, Unfoldings)> {
    let positions = dpos(first.rhs(), second.lhs());
    let unfold_at = |p: &Position, supply: &mut VarSupply| Unfoldings {
        forward: forward_unfold(first, second.lhs(), p, trs, supply),
        backward: backward_unfold(second, first.rhs(), p, trs, supply),
    };
    match strategy {
        Strategy::All => positions
            .into_iter()
            .map(|p| {
                let u = unfold_at(&p, supply);
                (p, u)
            })
            .collect(),
        Strategy::Lm => positions
            .into_iter()
            .next()
            .map(|p| {
                let u = unfold_at(&p, supply);
                vec![(p, u)]
            })
            .unwrap_or_default(),
        Strategy::Lmne => {
            for p in positions {
                let u = unfold_at(&p, supply);
                if !u.is_empty() {
                    return vec![(p, u)];
                }
            }
            Vec::new()
        }
    }
}

/// Positions a strategy picks for the window `first`, `second`.
///
/// A singleton loop `[l → r]` is the window `l → r`, `l → r`.
pub fn select(
    strategy: Strategy,
    first: &FRule,
    second: &FRule,
    trs: &Trs,
    supply: &mut VarSupply,
) -> Vec<Position> {
    match strategy {
        Strategy::All => dpos(first.rhs(), second.lhs()),
        Strategy::Lm => dpos(first.rhs(), second.lhs())
            .into_iter()
            .take(1)
            .collect(),
        Strategy::Lmne => selected_unfoldings(strategy, first, second, trs, supply)
            .into_iter()
            .map(|(p, _)| p)
            .collect(),
    }
}

/// One application of the guided unfolding operator.
pub struct Unfolder<'a> {
    trs: &'a Trs,
    defined: BTreeSet<Symbol>,
    strategy: Strategy,
}

impl<'a> Unfolder<'a> {
    pub fn new(trs: &'a Trs, strategy: Strategy) -> Self {
        Unfolder {
            trs,
            defined: trs.defined_symbols(),
            strategy,
        }
    }

    pub fn defined(&self) -> &BTreeSet<Symbol> {
        &self.defined
    }

    /// Every loop derived from `lp` in one step, in a fixed order: windows
    /// left to right (the wrap-around window last), and within a window the
    /// merge, then forward, then backward unfoldings per selected position.
    pub fn step(&self, lp: &SyntacticLoop, supply: &mut VarSupply) -> Vec<SyntacticLoop> {
        let mut out = Vec::new();
        let rules = lp.rules();
        if lp.is_singleton() {
            let rule = &rules[0];
            for (p, found) in selected_unfoldings(self.strategy, rule, rule, self.trs, supply) {
                for (case, u) in found
                    .forward
                    .into_iter()
                    .map(|u| ("forward", u))
                    .chain(found.backward.into_iter().map(|u| ("backward", u)))
                {
                    if connectable(&u, &u, &self.defined) {
                        trace!("case 4 ({case}) at {p}: {u}");
                        out.push(SyntacticLoop::new_unchecked(vec![u]));
                    }
                }
            }
            return out;
        }
        let n = rules.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let (first, second) = (&rules[i], &rules[j]);
            if let Some(theta) = mgu(first.rhs(), second.lhs()) {
                let merged = FRule::from_parts(theta.apply(first.lhs()), theta.apply(second.rhs()));
                // the merged rule takes the window's place; rotate so it leads
                let mut rest: Vec<FRule> = Vec::with_capacity(n - 1);
                rest.push(merged);
                rest.extend((2..n).map(|k| rules[(i + k) % n].clone()));
                if let Some(lp) = self.accept(rest, 0, supply) {
                    trace!("case 1 window {}: {lp}", i + 1);
                    out.push(lp);
                }
            }
            for (p, found) in selected_unfoldings(self.strategy, first, second, self.trs, supply) {
                for u in found.forward {
                    let mut next = rules.to_vec();
                    next[i] = u;
                    if let Some(lp) = self.accept(next, i, supply) {
                        trace!("case 2 window {} at {p}: {lp}", i + 1);
                        out.push(lp);
                    }
                }
                for u in found.backward {
                    let mut next = rules.to_vec();
                    next[j] = u;
                    if let Some(lp) = self.accept(next, j, supply) {
                        trace!("case 3 window {} at {p}: {lp}", i + 1);
                        out.push(lp);
                    }
                }
            }
        }
        out
    }

    /// Keep `rules` if it is still a syntactic loop; only the rule at
    /// `changed` is new, so only its neighbourhood is checked.
    fn accept(
        &self,
        mut rules: Vec<FRule>,
        changed: usize,
        supply: &mut VarSupply,
    ) -> Option<SyntacticLoop> {
        let n = rules.len();
        let u = &rules[changed];
        let others = (0..n).filter(|&k| k != changed);
        if others.clone().any(|k| rules[k].shares_vars_with(u)) {
            rules[changed] = rules[changed].rename_apart(supply);
        }
        let u = &rules[changed];
        let form = canonical_rule(u);
        if others.clone().any(|k| canonical_rule(&rules[k]) == form) {
            return None;
        }
        let pred = &rules[(changed + n - 1) % n];
        let succ = &rules[(changed + 1) % n];
        if !connectable(pred, u, &self.defined) || !connectable(u, succ, &self.defined) {
            return None;
        }
        debug_assert_eq!(validate_loop(&rules, &self.defined), Ok(()));
        Some(SyntacticLoop::new_unchecked(rules))
    }
}

/// `GU_R(X)`, deduplicated modulo renaming and rotation.
pub fn gu_step(
    loops: &[SyntacticLoop],
    trs: &Trs,
    strategy: Strategy,
    supply: &mut VarSupply,
) -> Vec<SyntacticLoop> {
    let unfolder = Unfolder::new(trs, strategy);
    let mut seen: HashSet<CanonicalLoop> = HashSet::new();
    let mut out = Vec::new();
    for lp in loops {
        for next in unfolder.step(lp, supply) {
            if seen.insert(next.canonical_form()) {
                out.push(next);
            }
        }
    }
    out
}

/// Unfold from the simple cycles of `trs` until `on_loop` returns a value
/// for some singleton, the frontier empties, or the budget runs out.
///
/// Each distinct loop is explored once; `on_loop` sees every new singleton
/// (those among the simple cycles included) together with its iteration.
pub fn gunf_iterate<T>(
    trs: &Trs,
    strategy: Strategy,
    limits: CycleLimits,
    budget: UnfoldBudget,
    supply: &mut VarSupply,
    mut on_loop: impl FnMut(&SyntacticLoop, usize) -> Option<T>,
) -> (IterationReport, Option<T>) {
    let start = Instant::now();
    let out_of_time = || {
        budget
            .time_limit
            .is_some_and(|limit| start.elapsed() >= limit)
    };
    let graph = DepGraph::build(trs);
    let unfolder = Unfolder::new(trs, strategy);
    let mut seen: HashSet<CanonicalLoop> = HashSet::new();
    let mut report = IterationReport {
        iterations: 0,
        generated: 0,
        frontier_empty: false,
        stop: StopReason::FrontierEmpty,
        found_at: None,
    };

    let mut frontier = Vec::new();
    for lp in initial_loops(&graph, limits, supply) {
        if !seen.insert(lp.canonical_form()) {
            continue;
        }
        report.generated += 1;
        if lp.is_singleton() {
            if let Some(found) = on_loop(&lp, 0) {
                report.stop = StopReason::Found;
                report.found_at = Some(0);
                return (report, Some(found));
            }
        }
        frontier.push(lp);
    }

    loop {
        if frontier.is_empty() {
            report.frontier_empty = true;
            report.stop = StopReason::FrontierEmpty;
            return (report, None);
        }
        if budget
            .max_iterations
            .is_some_and(|n| report.iterations >= n)
        {
            report.stop = StopReason::IterationLimit;
            return (report, None);
        }
        report.iterations += 1;
        let iteration = report.iterations;
        trace!("iteration {iteration}: {} loops", frontier.len());
        let mut next = Vec::new();
        for lp in &frontier {
            if out_of_time() {
                report.stop = StopReason::TimeLimit;
                return (report, None);
            }
            for derived in unfolder.step(lp, supply) {
                if !seen.insert(derived.canonical_form()) {
                    continue;
                }
                report.generated += 1;
                if derived.is_singleton() {
                    if let Some(found) = on_loop(&derived, iteration) {
                        report.stop = StopReason::Found;
                        report.found_at = Some(iteration);
                        return (report, Some(found));
                    }
                }
                if report.generated >= budget.max_generated {
                    report.stop = StopReason::GeneratedLimit;
                    return (report, None);
                }
                next.push(derived);
            }
        }
        frontier = next;
    }
}
