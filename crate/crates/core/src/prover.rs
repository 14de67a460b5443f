//! Loop search: unfold, test singletons by semi-unification, certify.

use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::depgraph::{CycleLimits, SyntacticLoop};
use crate::rule::FRule;
use crate::semiunify::semi_unify;
use crate::subst::{match_term, mgu, Substitution};
use crate::term::Term;
use crate::trs::Trs;
use crate::unfold::{gunf_iterate, IterationReport, StopReason, Strategy, UnfoldBudget};
use crate::verify::{verify_loop, RewriteTrace, VerifyBounds};

/// How a compressed rule `s → t` is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopTest {
    /// `s θ1 θ2 = t θ1`.
    #[default]
    SemiUnify,
    /// Only `s θ = t θ` or `s θ = t`.
    UnifyOrMatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopWitness {
    /// The compressed rule `s# → t#`.
    pub rule: FRule,
    pub theta1: Substitution,
    pub theta2: Substitution,
    /// `s θ1`, over plain symbols.
    pub term: Term,
    pub certificate: Option<RewriteTrace>,
}

impl LoopWitness {
    pub fn is_verified(&self) -> bool {
        self.certificate.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    No(Box<LoopWitness>),
    DontKnow,
    Timeout,
}

impl Verdict {
    /// `NO`, `DON'T KNOW` or `TIMEOUT`.
    pub fn token(&self) -> &'static str {
        match self {
            Verdict::No(_) => "NO",
            Verdict::DontKnow => "DON'T KNOW",
            Verdict::Timeout => "TIMEOUT",
        }
    }

    pub fn witness(&self) -> Option<&LoopWitness> {
        match self {
            Verdict::No(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStats {
    pub dependency_pairs: usize,
    pub iterations: usize,
    pub generated: usize,
    pub found_at: Option<usize>,
    pub frontier_empty: bool,
    pub stop: StopReason,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub verdict: Verdict,
    pub stats: ProofStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProverConfig {
    pub strategy: Strategy,
    pub cycles: CycleLimits,
    pub budget: UnfoldBudget,
    pub verify: VerifyBounds,
    pub test: LoopTest,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            strategy: Strategy::Lmne,
            cycles: CycleLimits::default(),
            budget: UnfoldBudget::default(),
            verify: VerifyBounds::default(),
            test: LoopTest::default(),
        }
    }
}

/// Test a singleton loop `[s# → t#]` and build its witness `s θ1`.
pub fn check_singleton(lp: &SyntacticLoop) -> Option<LoopWitness> {
    check_singleton_with(lp, LoopTest::SemiUnify)
}

pub fn check_singleton_with(lp: &SyntacticLoop, test: LoopTest) -> Option<LoopWitness> {
    let [rule] = lp.rules() else {
        return None;
    };
    let s = rule.lhs().unmark_root().expect("tuple-rooted lhs");
    let t = rule.rhs().unmark_root().expect("tuple-rooted rhs");
    let (theta1, theta2) = match test {
        LoopTest::SemiUnify => {
            let found = semi_unify(&s, &t)?;
            (found.theta1, found.theta2)
        }
        LoopTest::UnifyOrMatch => match mgu(&s, &t) {
            Some(theta) => (theta, Substitution::identity()),
            None => (Substitution::identity(), match_term(&s, &t)?),
        },
    };
    let term = theta1.apply(&s);
    if theta2.apply(&term) != theta1.apply(&t) {
        warn!("discarding an ill-formed witness for {rule}");
        return None;
    }
    Some(LoopWitness {
        rule: rule.clone(),
        theta1,
        theta2,
        term,
        certificate: None,
    })
}

pub fn prove(trs: &Trs, config: &ProverConfig) -> Proof {
    let start = Instant::now();
    let mut supply = trs.var_supply();
    let (report, found): (IterationReport, Option<LoopWitness>) = gunf_iterate(
        trs,
        config.strategy,
        config.cycles,
        config.budget,
        &mut supply,
        |lp, _| check_singleton_with(lp, config.test),
    );
    let verdict = match found {
        Some(mut witness) => {
            witness.certificate = verify_loop(trs, &witness.term, config.verify);
            match &witness.certificate {
                Some(trace) => debug_assert_eq!(trace.replay(trs), Ok(())),
                None => debug!("no certificate for {} within bounds", witness.term),
            }
            Verdict::No(Box::new(witness))
        }
        None if report.stop.is_budget() => Verdict::Timeout,
        None => Verdict::DontKnow,
    };
    Proof {
        verdict,
        stats: ProofStats {
            dependency_pairs: trs.dependency_pairs().len(),
            iterations: report.iterations,
            generated: report.generated,
            found_at: report.found_at,
            frontier_empty: report.frontier_empty,
            stop: report.stop,
            elapsed: start.elapsed(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::tests::{c, f, v};
    use crate::term::Var;
    use crate::trs::tests::{marked, rule, toyama};

    fn singleton(l: Term, r: Term) -> SyntacticLoop {
        SyntacticLoop::new_unchecked(vec![FRule::new(l, r).unwrap()])
    }

    #[test]
    fn ground_singletons() {
        let sh = f("s", vec![c("h")]);
        let args = vec![sh.clone(), sh.clone(), sh];
        let w = check_singleton(&singleton(
            marked("f", args.clone()),
            marked("f", args.clone()),
        ))
        .unwrap();
        assert_eq!(w.term, f("f", args));
        assert!(w.theta1.is_identity() && w.theta2.is_identity());

        let f0 = marked("f", vec![c("0")]);
        let w = check_singleton(&singleton(f0.clone(), f0)).unwrap();
        assert_eq!(w.term, f("f", vec![c("0")]));
    }

    #[test]
    fn semi_unification_witness() {
        let (x, y) = (v(0), v(1));
        let lp = singleton(
            marked("f", vec![f("g", vec![x.clone(), c("0")]), y.clone()]),
            marked("f", vec![f("g", vec![c("0"), x]), f("h", vec![y.clone()])]),
        );
        let w = check_singleton(&lp).unwrap();
        assert_eq!(w.theta1, [(Var(0), c("0"))].into_iter().collect());
        assert_eq!(
            w.theta2,
            [(Var(1), f("h", vec![y.clone()]))].into_iter().collect()
        );
        assert_eq!(w.term, f("f", vec![f("g", vec![c("0"), c("0")]), y]));
        // neither unification nor matching closes this one
        assert_eq!(check_singleton_with(&lp, LoopTest::UnifyOrMatch), None);
    }

    #[test]
    fn non_singletons_are_not_tested() {
        let a = FRule::new(marked("f", vec![c("0")]), marked("g", vec![c("1")])).unwrap();
        let b = FRule::new(marked("g", vec![c("1")]), marked("f", vec![c("0")])).unwrap();
        assert_eq!(
            check_singleton(&SyntacticLoop::new_unchecked(vec![a, b])),
            None
        );
    }

    #[test]
    fn toyama_under_every_strategy() {
        let trs = toyama();
        for strategy in [Strategy::All, Strategy::Lm, Strategy::Lmne] {
            let config = ProverConfig {
                strategy,
                budget: UnfoldBudget::iterations(10),
                ..ProverConfig::default()
            };
            let proof = prove(&trs, &config);
            let w = proof
                .verdict
                .witness()
                .unwrap_or_else(|| panic!("{strategy}: {proof:?}"));
            assert!(proof.stats.found_at.unwrap() <= 3);
            assert!(w.is_verified());
        }
    }

    #[test]
    fn terminating_system() {
        let trs = Trs::new(vec![rule(c("0"), c("1"))]).unwrap();
        let proof = prove(&trs, &ProverConfig::default());
        assert_eq!(proof.verdict, Verdict::DontKnow);
        assert_eq!(proof.stats.iterations, 0);
        assert_eq!(proof.stats.dependency_pairs, 0);
    }

    #[test]
    fn budget_exhaustion_is_a_timeout() {
        let config = ProverConfig {
            budget: UnfoldBudget::iterations(1),
            ..ProverConfig::default()
        };
        let proof = prove(&toyama(), &config);
        assert_eq!(proof.verdict, Verdict::Timeout);
        assert_eq!(proof.stats.stop, StopReason::IterationLimit);
    }
}
