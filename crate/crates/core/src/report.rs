//! Plain-text and structured renderings of a proof.

use std::fmt::Write as _;

use serde::Serialize;

use crate::prover::{Proof, Verdict};
use crate::term::VarNames;
use crate::trs::Trs;
use crate::unfold::StopReason;
use crate::verify::RewriteTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Leave out wall-clock figures so that output is reproducible.
    pub timing: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { timing: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub from: String,
    /// 1-based rule number.
    pub rule: usize,
    pub position: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub steps: Vec<StepRecord>,
    pub closing_position: String,
    pub theta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub term: String,
    pub theta1: String,
    pub theta2: String,
    pub rule: String,
    pub verified: bool,
    pub certificate: Option<CertificateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofRecord {
    pub verdict: &'static str,
    pub witness: Option<WitnessRecord>,
    pub dependency_pairs: usize,
    pub iterations: usize,
    pub generated: usize,
    pub found_at: Option<usize>,
    pub frontier_empty: bool,
    pub stop: StopReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_secs: Option<f64>,
}

fn certificate_record(trace: &RewriteTrace, names: &VarNames) -> CertificateRecord {
    let mut from = &trace.start;
    let steps = trace
        .steps
        .iter()
        .map(|step| {
            let rec = StepRecord {
                from: from.display(names).to_string(),
                rule: step.rule + 1,
                position: step.position.to_string(),
                to: step.term.display(names).to_string(),
            };
            from = &step.term;
            rec
        })
        .collect();
    CertificateRecord {
        steps,
        closing_position: trace.closing.to_string(),
        theta: trace.theta.display(names).to_string(),
    }
}

pub fn record(proof: &Proof, trs: &Trs, options: RenderOptions) -> ProofRecord {
    let names = trs.var_names();
    let witness = proof.verdict.witness().map(|w| WitnessRecord {
        term: w.term.display(names).to_string(),
        theta1: w.theta1.display(names).to_string(),
        theta2: w.theta2.display(names).to_string(),
        rule: w.rule.display(names).to_string(),
        verified: w.is_verified(),
        certificate: w.certificate.as_ref().map(|t| certificate_record(t, names)),
    });
    let stats = &proof.stats;
    ProofRecord {
        verdict: proof.verdict.token(),
        witness,
        dependency_pairs: stats.dependency_pairs,
        iterations: stats.iterations,
        generated: stats.generated,
        found_at: stats.found_at,
        frontier_empty: stats.frontier_empty,
        stop: stats.stop,
        elapsed_secs: options.timing.then_some(stats.elapsed.as_secs_f64()),
    }
}

fn stop_text(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Found => "loop found",
        StopReason::FrontierEmpty => "no more unfolded rules",
        StopReason::TimeLimit => "time limit",
        StopReason::IterationLimit => "iteration limit",
        StopReason::GeneratedLimit => "generated-loop limit",
    }
}

/// The verdict token on the first line, then witness, statistics and
/// certificate.
pub fn render_plain(proof: &Proof, trs: &Trs, options: RenderOptions) -> String {
    let rec = record(proof, trs, options);
    let mut out = String::new();
    let _ = writeln!(out, "{}", rec.verdict);
    if let Some(w) = &rec.witness {
        let _ = writeln!(out, "witness: {}", w.term);
        let _ = writeln!(out, "theta1: {}", w.theta1);
        let _ = writeln!(out, "theta2: {}", w.theta2);
        let _ = writeln!(out, "rule: {}", w.rule);
    }
    let _ = writeln!(out, "dependency pairs: {}", rec.dependency_pairs);
    let _ = writeln!(out, "iterations: {}", rec.iterations);
    let _ = writeln!(out, "generated loops: {}", rec.generated);
    if !matches!(proof.verdict, Verdict::No(_)) {
        let _ = writeln!(out, "stopped: {}", stop_text(rec.stop));
    }
    if let Some(secs) = rec.elapsed_secs {
        let _ = writeln!(out, "time: {secs:.3}s");
    }
    if let Some(w) = &rec.witness {
        match &w.certificate {
            Some(cert) => {
                let _ = writeln!(out, "certificate:");
                for step in &cert.steps {
                    let _ = writeln!(
                        out,
                        "  {}  --[rule {} @ {}]-->  {}",
                        step.from, step.rule, step.position, step.to
                    );
                }
                let _ = writeln!(out, "  closing position: {}", cert.closing_position);
                let _ = writeln!(out, "  theta: {}", cert.theta);
            }
            None => {
                let _ = writeln!(out, "UNVERIFIED");
            }
        }
    }
    out
}
