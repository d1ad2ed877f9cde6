//! Command-line front end. Exit codes: 0 success, 1 usage or input error,
//! 2 the knowledge base has no model, 3 a point answer is not determined.

use std::io::Write;

use clap::{Parser, ValueEnum};

use crate::algebra::DEFAULT_ATOM_CAP;
use crate::crossentropy::TraceRecord;
use crate::inference::{answer_traced, check_kb_with_cap, decompose_blocks, InferError, Mode, Options, Verdict, DEFAULT_SAMPLES};
use crate::statistics::{Needs, StatModel};
use crate::syntax::{parse_kb, parse_query, KnowledgeBase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_MODEL: i32 = 2;
pub const EXIT_NOT_UNIQUE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Check,
    Query,
    DumpAtoms,
    DumpLp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Point,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Text,
    Json,
}

/// Query knowledge bases of statistical and subjective probability sentences.
#[derive(Debug, Parser)]
#[command(name = "cekb", version)]
pub struct CliConfig {
    pub command: Command,
    /// Knowledge base file.
    pub kb_path: String,
    /// Query, e.g. `prob(HappyEnd(f1)) = ?` (required for `query`).
    pub query_text: Option<String>,
    #[arg(long, value_enum, default_value = "point")]
    pub mode: ModeArg,
    /// Number of sampled statistical measures in interval mode.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = clap::value_parser!(usize))]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,
    /// Also print the atom spaces (to standard error).
    #[arg(long)]
    pub dump_atoms: bool,
    /// Also print the constraint rows (to standard error).
    #[arg(long)]
    pub dump_lp: bool,
    /// Stream projection residuals as CSV (to standard error).
    #[arg(long)]
    pub trace_ce: bool,
}

fn atom_cap() -> Result<usize, String> {
    match std::env::var("CEKB_ATOM_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| format!("CEKB_ATOM_CAP must be a positive integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_ATOM_CAP),
    }
}

/// The model used by the dumps: every predicate, plus the pair space when a
/// belief links two individuals.
fn dump_model(kb: &KnowledgeBase, cap: usize) -> Result<StatModel, String> {
    let mut needs = Needs::all(&kb.signature);
    for block in decompose_blocks(kb).blocks.iter().filter(|b| b.len() == 2) {
        for b in kb.beliefs.iter().filter(|b| b.subjects().iter().any(|s| block.contains(s))) {
            needs.binary.extend(b.predicates());
        }
    }
    StatModel::compile_with_cap(kb, &needs, cap).map_err(|e| e.to_string())
}

fn atoms_text(m: &StatModel) -> String {
    let mut s = format!("# arity 1: {} atoms\n{}", m.space1.len(), m.space1.dump());
    if let Some(s2) = &m.space2 {
        s += &format!("# arity 2: {} atoms\n{}", s2.len(), s2.dump());
    }
    s
}

fn exit_code(e: &InferError) -> i32 {
    if e.is_no_model() {
        EXIT_NO_MODEL
    } else if matches!(e, InferError::NotUnique(_)) {
        EXIT_NOT_UNIQUE
    } else {
        EXIT_USAGE
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cfg, out, err) {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, (i32, String)> {
    let usage = |m: String| (EXIT_USAGE, m);
    if cfg.samples < 2 {
        return Err(usage("--samples must be at least 2".into()));
    }
    if (cfg.command == Command::Query) != cfg.query_text.is_some() {
        return Err(usage(if cfg.command == Command::Query {
            "the query command needs a query".into()
        } else {
            "only the query command takes a query".into()
        }));
    }
    let cap = atom_cap().map_err(usage)?;
    let text = std::fs::read_to_string(&cfg.kb_path).map_err(|e| usage(format!("{}: {e}", cfg.kb_path)))?;
    let kb = parse_kb(&text).map_err(|e| usage(format!("{}:{e}", cfg.kb_path)))?;
    let io = |e: std::io::Error| (EXIT_USAGE, e.to_string());
    let json = cfg.output == OutputArg::Json;

    if cfg.dump_atoms || cfg.dump_lp {
        let m = dump_model(&kb, cap).map_err(usage)?;
        if cfg.dump_atoms {
            write!(err, "{}", atoms_text(&m)).map_err(io)?;
        }
        if cfg.dump_lp {
            write!(err, "{}", m.constraints.dump()).map_err(io)?;
        }
    }
    match cfg.command {
        Command::DumpAtoms | Command::DumpLp => {
            let m = dump_model(&kb, cap).map_err(usage)?;
            let body = if cfg.command == Command::DumpAtoms {
                atoms_text(&m)
            } else {
                m.constraints.dump()
            };
            if json {
                let key = if cfg.command == Command::DumpAtoms { "atoms" } else { "lp" };
                writeln!(out, "{}", serde_json::json!({ key: body })).map_err(io)?;
            } else {
                write!(out, "{body}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Check => {
            let report = check_kb_with_cap(&kb, cap);
            if json {
                writeln!(out, "{}", report.to_json()).map_err(io)?;
            } else {
                write!(out, "{}", report.to_text()).map_err(io)?;
            }
            Ok(if report.has_model == Verdict::No { EXIT_NO_MODEL } else { EXIT_OK })
        }
        Command::Query => {
            let qtext = cfg.query_text.as_deref().unwrap_or_default();
            let query = parse_query(qtext, &kb.signature).map_err(|e| usage(format!("query:{e}")))?;
            let report = check_kb_with_cap(&kb, cap);
            if report.has_model == Verdict::No {
                let mut msg = "the knowledge base has no model".to_string();
                for c in &report.conflicts {
                    msg += &format!("\n  conflicting: {c}");
                }
                for n in &report.notes {
                    msg += &format!("\n  {n}");
                }
                return Err((EXIT_NO_MODEL, msg));
            }
            let opts = Options {
                mode: match cfg.mode {
                    ModeArg::Point => Mode::Point,
                    ModeArg::Interval => Mode::Interval {
                        samples: cfg.samples,
                        seed: cfg.seed,
                    },
                },
                atom_cap: cap,
            };
            let result = if cfg.trace_ce {
                writeln!(err, "sweep,row_id,residual,ce_value").map_err(io)?;
                let mut sink = |r: &TraceRecord| {
                    let _ = writeln!(err, "{},{},{:e},{:.15}", r.sweep, r.row, r.residual, r.ce_value);
                };
                answer_traced(&kb, &query, &opts, Some(&mut sink))
            } else {
                answer_traced(&kb, &query, &opts, None)
            };
            let result = result.map_err(|e| (exit_code(&e), e.to_string()))?;
            if json {
                writeln!(out, "{}", result.to_json()).map_err(io)?;
            } else {
                write!(out, "{}", result.to_text()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
    }
}
