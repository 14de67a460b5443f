use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use log::{debug, LevelFilter};
use loopfinder::{
    parse_trs, prove, record, render_plain, CycleLimits, DepGraph, LoopTest, ParseErrors, Proof,
    ProofRecord, ProverConfig, RenderOptions, Strategy, UnfoldBudget, Verdict, VerifyBounds,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

const EXIT_NO: u8 = 0;
const EXIT_DONT_KNOW: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INPUT_ERROR: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    All,
    Lm,
    Lmne,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::All => Strategy::All,
            StrategyArg::Lm => Strategy::Lm,
            StrategyArg::Lmne => Strategy::Lmne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestArg {
    /// s θ1 θ2 = t θ1
    Semi,
    /// unification or matching only
    UnifyMatch,
}

/// Prove non-termination of term rewrite systems by finding loops.
///
/// The first line of output for a single file is `NO`, `DON'T KNOW` or
/// `TIMEOUT`. Exit status: 0 NO, 1 DON'T KNOW, 2 TIMEOUT, 3 input error.
/// A directory is searched for `.trs` files and summarised. The
/// LOOPFINDER_SEED environment variable is reserved and has no effect.
#[derive(Debug, Parser)]
#[command(name = "loopfinder", version)]
struct Args {
    /// A `.trs` file or a directory of them.
    input: PathBuf,

    #[arg(long, value_enum, default_value = "lmne")]
    strategy: StrategyArg,

    /// Wall-clock limit per system, in seconds.
    #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,

    /// Unfolding rounds before giving up (unbounded by default).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_iterations: Option<u64>,

    /// Distinct loops generated before giving up.
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_generated: u64,

    /// Simple cycles taken from each component.
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    max_cycles: u64,

    /// Longest simple cycle considered.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    max_cycle_len: u64,

    /// Rewrite steps searched when certifying a loop.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    verify_depth: u64,

    /// Terms visited when certifying a loop.
    #[arg(long, default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..))]
    verify_nodes: u64,

    /// Test applied to compressed rules.
    #[arg(long, value_enum, default_value = "semi")]
    test: TestArg,

    #[arg(long, value_enum, default_value = "plain")]
    format: Format,

    /// Leave timing out of the output.
    #[arg(long)]
    no_time: bool,

    /// Write the dependency graph to stderr as `i -> j` lines.
    #[arg(long)]
    dump_graph: bool,

    /// Log each unfolding step to stderr.
    #[arg(long)]
    verbose: bool,
}

impl Args {
    fn config(&self) -> ProverConfig {
        ProverConfig {
            strategy: self.strategy.into(),
            cycles: CycleLimits {
                max_count: self.max_cycles as usize,
                max_len: self.max_cycle_len as usize,
            },
            budget: UnfoldBudget {
                time_limit: Some(Duration::from_secs(self.timeout)),
                max_iterations: self.max_iterations.map(|n| n as usize),
                max_generated: self.max_generated as usize,
            },
            verify: VerifyBounds {
                max_depth: self.verify_depth as usize,
                max_nodes: self.verify_nodes as usize,
            },
            test: match self.test {
                TestArg::Semi => LoopTest::SemiUnify,
                TestArg::UnifyMatch => LoopTest::UnifyOrMatch,
            },
        }
    }

    fn render_options(&self) -> RenderOptions {
        RenderOptions {
            timing: !self.no_time,
        }
    }
}

#[derive(Debug, Error)]
enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{}", .errors.join("\n"))]
    Parse { errors: Vec<String> },
    #[error("{0}: no such file or directory")]
    Missing(String),
}

fn parse_error(path: &Path, errors: ParseErrors) -> InputError {
    let shown = path.display();
    InputError::Parse {
        errors: errors.0.iter().map(|e| format!("{shown}:{e}")).collect(),
    }
}

#[derive(Serialize)]
struct FileRecord<'a> {
    file: String,
    strategy: Strategy,
    #[serde(flatten)]
    proof: &'a ProofRecord,
}

struct Analysis {
    path: PathBuf,
    outcome: Result<(Proof, ProofRecord, String, Option<String>), InputError>,
}

fn analyse(path: &Path, args: &Args) -> Analysis {
    let outcome = (|| {
        let text = fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trs = parse_trs(&text).map_err(|errors| parse_error(path, errors))?;
        let graph = args.dump_graph.then(|| DepGraph::build(&trs).edge_list());
        let proof = prove(&trs, &args.config());
        let rec = record(&proof, &trs, args.render_options());
        let plain = render_plain(&proof, &trs, args.render_options());
        Ok((proof, rec, plain, graph))
    })();
    Analysis {
        path: path.to_path_buf(),
        outcome,
    }
}

fn exit_code(verdict: &Verdict) -> u8 {
    match verdict {
        Verdict::No(_) => EXIT_NO,
        Verdict::DontKnow => EXIT_DONT_KNOW,
        Verdict::Timeout => EXIT_TIMEOUT,
    }
}

fn run_file(path: &Path, args: &Args) -> u8 {
    let analysis = analyse(path, args);
    match analysis.outcome {
        Ok((proof, rec, plain, graph)) => {
            if let Some(edges) = graph {
                eprint!("{edges}");
            }
            let mut stdout = std::io::stdout().lock();
            let _ = match args.format {
                Format::Plain => write!(stdout, "{plain}"),
                Format::Json => writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string(&FileRecord {
                        file: path.display().to_string(),
                        strategy: args.strategy.into(),
                        proof: &rec,
                    })
                    .expect("records serialise")
                ),
            };
            exit_code(&proof.verdict)
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

#[derive(Debug, Default, Serialize)]
struct Summary {
    files: usize,
    no: usize,
    dont_know: usize,
    timeout: usize,
    errors: usize,
    generated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_secs: Option<f64>,
}

fn trs_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "trs"))
        .map(|e| e.into_path())
        .collect();
    files.sort();
    files
}

fn run_dir(dir: &Path, args: &Args) -> u8 {
    let started = Instant::now();
    let files = trs_files(dir);
    let results: Vec<Analysis> = files.par_iter().map(|p| analyse(p, args)).collect();

    let mut summary = Summary {
        files: results.len(),
        ..Summary::default()
    };
    let mut stdout = std::io::stdout().lock();
    let width = results
        .iter()
        .map(|a| a.path.display().to_string().len())
        .max()
        .unwrap_or(4)
        .max(4);
    if args.format == Format::Plain {
        let _ = writeln!(
            stdout,
            "{:<width$}  {:<10}  {:>10}  {:>10}",
            "file", "verdict", "iterations", "generated"
        );
    }
    for a in &results {
        let shown = a.path.display().to_string();
        match &a.outcome {
            Ok((proof, rec, _, graph)) => {
                if let Some(edges) = graph {
                    eprint!("# {shown}\n{edges}");
                }
                match proof.verdict {
                    Verdict::No(_) => summary.no += 1,
                    Verdict::DontKnow => summary.dont_know += 1,
                    Verdict::Timeout => summary.timeout += 1,
                }
                summary.generated += rec.generated;
                let _ = match args.format {
                    Format::Plain => writeln!(
                        stdout,
                        "{:<width$}  {:<10}  {:>10}  {:>10}",
                        shown, rec.verdict, rec.iterations, rec.generated
                    ),
                    Format::Json => writeln!(
                        stdout,
                        "{}",
                        serde_json::to_string(&FileRecord {
                            file: shown,
                            strategy: args.strategy.into(),
                            proof: rec,
                        })
                        .expect("records serialise")
                    ),
                };
            }
            Err(e) => {
                summary.errors += 1;
                eprintln!("error: {e}");
                if args.format == Format::Plain {
                    let _ = writeln!(stdout, "{:<width$}  {:<10}", shown, "ERROR");
                }
            }
        }
    }
    if !args.no_time {
        summary.total_secs = Some(started.elapsed().as_secs_f64());
    }
    let _ = match args.format {
        Format::Plain => {
            let _ = writeln!(stdout);
            let _ = writeln!(
                stdout,
                "{:>6}  {:>6}  {:>10}  {:>7}  {:>6}  {:>10}",
                "files", "NO", "DON'T KNOW", "TIMEOUT", "errors", "generated"
            );
            let _ = writeln!(
                stdout,
                "{:>6}  {:>6}  {:>10}  {:>7}  {:>6}  {:>10}",
                summary.files,
                summary.no,
                summary.dont_know,
                summary.timeout,
                summary.errors,
                summary.generated
            );
            match summary.total_secs {
                Some(secs) => writeln!(stdout, "total time: {secs:.3}s"),
                None => Ok(()),
            }
        }
        Format::Json => writeln!(stdout, "{}", serde_json::json!({ "summary": summary })),
    };
    if summary.errors > 0 {
        EXIT_INPUT_ERROR
    } else {
        EXIT_NO
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(LevelFilter::Warn)
        .filter_module(
            "loopfinder",
            if args.verbose {
                LevelFilter::Trace
            } else {
                LevelFilter::Warn
            },
        )
        .format_timestamp(None)
        .init();
    if std::env::var_os("LOOPFINDER_SEED").is_some() {
        debug!("LOOPFINDER_SEED is set but the analysis uses no randomness");
    }

    let code = if args.input.is_dir() {
        run_dir(&args.input, &args)
    } else if args.input.is_file() {
        run_file(&args.input, &args)
    } else {
        eprintln!(
            "error: {}",
            InputError::Missing(args.input.display().to_string())
        );
        EXIT_INPUT_ERROR
    };
    ExitCode::from(code)
}
