pub mod canon;
pub mod depgraph;
pub mod parse;
pub mod prover;
pub mod report;
pub mod rule;
pub mod semiunify;
pub mod subst;
pub mod term;
pub mod trs;
pub mod unfold;
pub mod verify;

pub use canon::{canonical_loop, canonical_rule, CanonicalLoop, CanonicalRule};
pub use depgraph::{
    cap, connectable, initial_loops, ren, validate_loop, CycleLimits, DepGraph, LoopError,
    SyntacticLoop,
};
pub use parse::{parse_trs, print_trs, ParseError, ParseErrorKind, ParseErrors};
pub use prover::{
    check_singleton, check_singleton_with, prove, LoopTest, LoopWitness, Proof, ProofStats,
    ProverConfig, Verdict,
};
pub use report::{record, render_plain, ProofRecord, RenderOptions};
pub use rule::{FRule, Rule, RuleError};
pub use semiunify::{semi_unify, SemiUnifier};
pub use subst::{match_term, mgu, Substitution};
pub use term::{dpos, npos, Position, Symbol, Term, Var, VarNames, VarSupply};
pub use trs::{Step, Trs, TrsError};
pub use unfold::{
    backward_unfold, forward_unfold, gu_step, gunf_iterate, select, IterationReport, StopReason,
    Strategy, UnfoldBudget, Unfolder,
};
pub use verify::{verify_loop, ReplayError, RewriteTrace, VerifyBounds};
