//! Independent loop certificates: a bounded breadth-first rewrite search
//! from a term back to an instance of itself.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::subst::{match_term, Substitution};
use crate::term::{Position, Term};
use crate::trs::{Step, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyBounds {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for VerifyBounds {
    fn default() -> Self {
        VerifyBounds {
            max_depth: 25,
            max_nodes: 200_000,
        }
    }
}

/// `start →+ last` with `last|closing = start θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteTrace {
    pub start: Term,
    pub steps: Vec<Step>,
    pub closing: Position,
    pub theta: Substitution,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("trace has no steps")]
    Empty,
    #[error("step {0} is not a rewrite step of its predecessor")]
    BadStep(usize),
    #[error("closing position {0} is not a position of the final term")]
    BadClosingPosition(Position),
    #[error("final term does not contain the start instance at the closing position")]
    NotClosed,
}

impl RewriteTrace {
    pub fn final_term(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.term)
    }

    /// Re-check every step against the rewrite engine and the closing
    /// condition by direct substitution.
    pub fn replay(&self, trs: &Trs) -> Result<(), ReplayError> {
        if self.steps.is_empty() {
            return Err(ReplayError::Empty);
        }
        let mut current = &self.start;
        for (i, step) in self.steps.iter().enumerate() {
            if !trs.successors(current).contains(step) {
                return Err(ReplayError::BadStep(i));
            }
            current = &step.term;
        }
        let at = current
            .get(&self.closing)
            .ok_or_else(|| ReplayError::BadClosingPosition(self.closing.clone()))?;
        if *at != self.theta.apply(&self.start) {
            return Err(ReplayError::NotClosed);
        }
        Ok(())
    }
}

/// The first position of `v` (pre-order) holding an instance of `u`.
fn instance_within(u: &Term, v: &Term) -> Option<(Position, Substitution)> {
    v.positions().into_iter().find_map(|q| {
        let sub = v.get(&q).expect("own position");
        match_term(u, sub).map(|theta| (q, theta))
    })
}

/// Search breadth-first for `u →+ C[uθ]` within `bounds`.
pub fn verify_loop(trs: &Trs, u: &Term, bounds: VerifyBounds) -> Option<RewriteTrace> {
    struct Node {
        parent: Option<usize>,
        step: Option<Step>,
        depth: usize,
    }
    let mut nodes = vec![Node {
        parent: None,
        step: None,
        depth: 0,
    }];
    let mut terms = vec![u.clone()];
    let mut visited: HashSet<Term> = HashSet::from([u.clone()]);
    let mut queue = VecDeque::from([0usize]);

    let trace_to = |nodes: &[Node], mut at: usize, last: Step| {
        let mut steps = vec![last];
        while let Some(step) = &nodes[at].step {
            steps.push(step.clone());
            at = nodes[at].parent.expect("non-root nodes have parents");
        }
        steps.reverse();
        steps
    };

    while let Some(at) = queue.pop_front() {
        if nodes[at].depth >= bounds.max_depth {
            continue;
        }
        for step in trs.successors(&terms[at]) {
            if let Some((closing, theta)) = instance_within(u, &step.term) {
                let steps = trace_to(&nodes, at, step);
                return Some(RewriteTrace {
                    start: u.clone(),
                    steps,
                    closing,
                    theta,
                });
            }
            if nodes.len() >= bounds.max_nodes || !visited.insert(step.term.clone()) {
                continue;
            }
            terms.push(step.term.clone());
            nodes.push(Node {
                parent: Some(at),
                depth: nodes[at].depth + 1,
                step: Some(step),
            });
            queue.push_back(nodes.len() - 1);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::tests::{c, f, pos};
    use crate::trs::tests::{rule, toyama};

    #[test]
    fn toyama_closes_in_three_steps() {
        let trs = toyama();
        let sh = f("s", vec![c("h")]);
        let u = f("f", vec![sh.clone(), sh.clone(), sh]);
        let trace = verify_loop(&trs, &u, VerifyBounds::default()).unwrap();
        assert_eq!(trace.steps.len(), 3);
        let rules: Vec<usize> = trace.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, [1, 2, 0]);
        assert_eq!(trace.closing, Position::root());
        assert!(trace.theta.is_identity());
        trace.replay(&trs).unwrap();
    }

    #[test]
    fn two_rule_cycle() {
        let trs = Trs::new(vec![
            rule(f("f", vec![c("0")]), f("g", vec![c("1")])),
            rule(f("g", vec![c("1")]), f("f", vec![c("0")])),
        ])
        .unwrap();
        let u = f("f", vec![c("0")]);
        let trace = verify_loop(&trs, &u, VerifyBounds::default()).unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[0].term, f("g", vec![c("1")]));
        assert_eq!(trace.final_term(), &u);
        trace.replay(&trs).unwrap();
    }

    #[test]
    fn terminating_system_has_no_trace() {
        let trs = Trs::new(vec![rule(c("0"), c("1"))]).unwrap();
        assert_eq!(verify_loop(&trs, &c("0"), VerifyBounds::default()), None);
    }

    #[test]
    fn tampered_traces_fail_replay() {
        let trs = toyama();
        let sh = f("s", vec![c("h")]);
        let u = f("f", vec![sh.clone(), sh.clone(), sh]);
        let trace = verify_loop(&trs, &u, VerifyBounds::default()).unwrap();

        let mut bad = trace.clone();
        bad.steps[1].position = pos("3.1");
        assert_eq!(bad.replay(&trs), Err(ReplayError::BadStep(1)));

        let mut bad = trace.clone();
        bad.closing = pos("1");
        assert_eq!(bad.replay(&trs), Err(ReplayError::NotClosed));

        let mut bad = trace;
        bad.steps.clear();
        assert_eq!(bad.replay(&trs), Err(ReplayError::Empty));
    }

    #[test]
    fn depth_bound_is_respected() {
        let trs = toyama();
        let sh = f("s", vec![c("h")]);
        let u = f("f", vec![sh.clone(), sh.clone(), sh]);
        let shallow = VerifyBounds {
            max_depth: 2,
            max_nodes: 1000,
        };
        assert_eq!(verify_loop(&trs, &u, shallow), None);
    }
}
