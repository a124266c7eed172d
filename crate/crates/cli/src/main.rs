//! `softcover`: batch front-end for the soft covering lab.
//!
//! Exit codes: 0 success, 1 validation error, 2 solver failure,
//! 3 property or bound violation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod model;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use softcover_core::codebook::CodebookKind;
use thiserror::Error;

use report::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<softcover_core::Error> for CliError {
    fn from(e: softcover_core::Error) -> Self {
        match e {
            softcover_core::Error::NoConvergence(_) => CliError::Solver(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

/// How a command that produced output finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some value did not converge; the affected rows are flagged.
    SolverFailure,
    /// A checked property or bound does not hold.
    Violation,
}

#[derive(Debug, Parser)]
#[command(name = "softcover", version, about = "Quantum soft covering numerical lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Omit the timestamp line (CSV) or field (JSON).
    #[arg(long)]
    pub no_header: bool,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Information quantities per order, plus I, V and V_breve.
    Info {
        /// Model file, or builtin:<name>.
        #[arg(long)]
        model: String,
        /// Orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1.25,1.5,2")]
        alpha: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Error exponents per rate.
    Exponent {
        #[arg(long)]
        model: String,
        /// Rates in nats, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        rate: Vec<f64>,
        /// Blocklength; constant-composition columns are left empty when the
        /// prior has no integral composition at this length.
        #[arg(long = "n")]
        n: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Expected trace distance of a random codebook next to the n-shot bounds.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, default_value = "iid")]
        kind: KindArg,
        #[arg(long = "n")]
        n: usize,
        /// Number of codewords.
        #[arg(long = "M", conflicts_with = "rate", required_unless_present = "rate")]
        m: Option<usize>,
        /// Rate in nats; the codebook has ceil(e^{nR}) codewords.
        #[arg(long)]
        rate: Option<f64>,
        /// Monte Carlo codebooks.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Enumerate all codebooks instead of sampling.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Property suites; nonzero exit on any failure.
    Verify {
        /// Comma-separated suite names, "default" or "all".
        #[arg(long, value_delimiter = ',', default_value = "default")]
        suite: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Moderate-deviation scan for R_n = I + c n^{-t}.
    Moderate {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0.25)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long = "n-list", value_delimiter = ',', default_value = "100,10000,1000000")]
        n_list: Vec<u64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Iid,
    Cc,
}

impl From<KindArg> for CodebookKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Iid => CodebookKind::Iid,
            KindArg::Cc => CodebookKind::ConstantComposition,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SOFTCOVER_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("SOFTCOVER_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn run(cli: Cli, echo: Vec<String>) -> Result<Status, CliError> {
    configure_threads()?;
    let start = Instant::now();
    let (result, out) = match cli.command {
        Command::Info { model, alpha, out } => (commands::info(&model, &alpha), out),
        Command::Exponent { model, rate, n, out } => (commands::exponent(&model, &rate, n), out),
        Command::Simulate {
            model,
            kind,
            n,
            m,
            rate,
            samples,
            exact,
            out,
        } => {
            let req = commands::SimulateRequest {
                kind: kind.into(),
                n,
                m,
                rate,
                samples,
                exact,
                seed: out.seed,
            };
            (commands::simulate(&model, &req), out)
        }
        Command::Verify { suite, out } => (commands::verify(&suite, out.seed), out),
        Command::Moderate {
            model,
            t,
            c,
            n_list,
            out,
        } => (commands::moderate(&model, t, c, &n_list), out),
    };
    let (status, table, config) = result?;
    let report = report::RunReport {
        command: echo,
        config,
        seed: out.seed,
        table,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    report.write(&mut lock, out.format, !out.no_header)?;
    lock.flush()?;
    Ok(status)
}

fn main() -> ExitCode {
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, echo) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::SolverFailure) => ExitCode::from(2),
        Ok(Status::Violation) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
