//! The `alcd` command line.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use alcd_core::oracle::{bounded_model_search_with_budget, SearchOutcome};
use alcd_core::reductions::{reduce_feature_assertions, reduce_singleton_predicates, reduction_pipeline};
use alcd_core::{Ontology, Reasoner};
use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dump;
use crate::report::{stats_line, verdict_word, JsonVerdict};
use crate::text::{parse_ontology, print_ontology, ParseError};

pub const EXIT_CONSISTENT: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_NO_WITNESS: i32 = 3;

const DEFAULT_SEED: u64 = 0;
const ORACLE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "alcd", version, about = "Consistency checking for ALC(D) ontologies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide consistency.
    Check {
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
        /// Print one line per eliminated signature to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Input file, or `-` for stdin.
        input: PathBuf,
    },
    /// Remove singleton predicates, feature and predicate assertions.
    Reduce { input: PathBuf },
    /// Print a finite prefix of a model.
    Witness {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        input: PathBuf,
    },
    /// Search a model with at most `kmax` elements by brute force.
    Oracle {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        kmax: u32,
        input: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Reasoner(#[from] alcd_core::ReasonerError),
}

fn read_input(path: &PathBuf, stdin: &mut dyn Read) -> Result<Ontology, CliError> {
    let shown = path.display().to_string();
    let mut src = String::new();
    let read = if shown == "-" {
        stdin.read_to_string(&mut src).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|s| src = s)
    };
    read.map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_ontology(&src).map_err(|source| CliError::Parse { path: shown, source })
}

fn execute(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let code = match cmd {
        Command::Check {
            json,
            trace,
            seed,
            input,
        } => {
            let o = read_input(&input, stdin)?;
            let start = Instant::now();
            let verdict = Reasoner::new(&o)?.with_seed(seed).decide();
            let ms = start.elapsed().as_millis() as u64;
            if trace {
                for line in verdict.trace_lines() {
                    let _ = writeln!(err, "{line}");
                }
            }
            if json {
                let _ = writeln!(out, "{}", JsonVerdict::new(&verdict, ms).to_json());
            } else {
                let _ = writeln!(out, "{}", verdict_word(verdict.consistent));
                let _ = writeln!(out, "{}", stats_line(&verdict.stats));
            }
            if verdict.consistent {
                EXIT_CONSISTENT
            } else {
                EXIT_INCONSISTENT
            }
        }
        Command::Reduce { input } => {
            let o = read_input(&input, stdin)?;
            o.validate().map_err(alcd_core::ReasonerError::from)?;
            let _ = write!(out, "{}", print_ontology(&reduction_pipeline(&o)?));
            EXIT_CONSISTENT
        }
        Command::Witness { depth, seed, input } => {
            let o = read_input(&input, stdin)?;
            let reasoner = Reasoner::new(&o)?.with_seed(seed);
            let (verdict, model) = reasoner.witness(depth as usize)?;
            match model {
                Some(m) if verdict.consistent => {
                    let _ = writeln!(out, "consistent");
                    let _ = write!(out, "{}", dump::witness(&m));
                    EXIT_CONSISTENT
                }
                _ => {
                    let _ = writeln!(out, "inconsistent");
                    EXIT_NO_WITNESS
                }
            }
        }
        Command::Oracle { kmax, input } => {
            let o = read_input(&input, stdin)?;
            o.validate().map_err(alcd_core::ReasonerError::from)?;
            let mut o = o;
            if o.has_singletons() {
                o = reduce_singleton_predicates(&o);
            }
            if o.has_feature_assertions() {
                o = reduce_feature_assertions(&o)?;
            }
            match bounded_model_search_with_budget(&o, kmax as usize, ORACLE_BUDGET) {
                SearchOutcome::Found(m) => {
                    let _ = writeln!(out, "model-found");
                    let _ = write!(out, "{}", dump::interpretation(&m, None));
                    EXIT_CONSISTENT
                }
                outcome => {
                    if outcome == SearchOutcome::GaveUp {
                        let _ = writeln!(err, "note: search budget exhausted before the bound was covered");
                    }
                    let _ = writeln!(out, "no-model-within-bound");
                    EXIT_INCONSISTENT
                }
            }
        }
    };
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
