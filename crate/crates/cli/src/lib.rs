//! Command-line experiment runner for the `crofton` library.
//!
//! Every subcommand reads its options from flags and, optionally, from a
//! TOML file given with `--config` (flags win). Results go to a CSV file
//! with a header row and a `# config_hash=` comment row, next to a run
//! manifest.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{
    CoeffsOpts, CurvesOpts, EstimateOpts, Figure1Opts, Figure2Opts, ProcessOpts, SelfcheckOpts, TruthOpts,
};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "CROFTON_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical contract violated: {0}")]
    Contract(String),
    #[error(transparent)]
    Core(#[from] crofton::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crofton::Error as E;
        match self {
            Self::Config(_) => 2,
            Self::Contract(_) => 3,
            Self::Core(E::Degenerate(_)) | Self::Io(_) => 1,
            Self::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "crofton", version, about = "Surface tensors from line sections: oracles, estimators, experiments")]
pub struct Cli {
    /// Worker threads (default: $CROFTON_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with the subcommand's options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (default: `<subcommand>.csv`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient tables c, C, d and the measurement function.
    Coeffs(CoeffsOpts),
    /// Ground-truth surface tensor of a body.
    Truth(TruthOpts),
    /// Quadrature Crofton integrals against the tensor identities.
    Oracle(TruthOpts),
    /// Monte-Carlo run of one estimator design.
    Estimate(EstimateOpts),
    /// Positive-definiteness of systematic planar designs.
    Figure1(Figure1Opts),
    /// CV comparison on rotated spheroids.
    Figure2(Figure2Opts),
    /// Second-moment curves of single-component estimators.
    Curves(CurvesOpts),
    /// Specific surface tensors of a Poisson particle process.
    Process(ProcessOpts),
    /// Runs the coefficient and oracle checks.
    Selfcheck(SelfcheckOpts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Coeffs(_) => "coeffs",
            Self::Truth(_) => "truth",
            Self::Oracle(_) => "oracle",
            Self::Estimate(_) => "estimate",
            Self::Figure1(_) => "figure1",
            Self::Figure2(_) => "figure2",
            Self::Curves(_) => "curves",
            Self::Process(_) => "process",
            Self::Selfcheck(_) => "selfcheck",
        }
    }
}

/// Parses `argv` (program name first) and runs; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn worker_count(flag: Option<usize>) -> Result<usize, CliError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    Ok(n)
}

/// Runs a parsed command line and returns the files written.
pub fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let threads = worker_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    let config_dir = cli.config.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf).unwrap_or_default();
    let cfg = cli.config.as_ref();
    let here = PathBuf::new();
    pool.install(|| match cli.command {
        Command::Coeffs(o) => commands::coeffs(o.merge(config::load(cfg)?), &out),
        Command::Truth(o) => {
            let base = if o.body.is_some() { &here } else { &config_dir };
            commands::truth(o.merge(config::load(cfg)?), base, &out)
        }
        Command::Oracle(o) => {
            let base = if o.body.is_some() { &here } else { &config_dir };
            commands::oracle(o.merge(config::load(cfg)?), base, &out)
        }
        Command::Estimate(o) => {
            let base = if o.body.is_some() { &here } else { &config_dir };
            commands::estimate(o.merge(config::load(cfg)?), base, &out)
        }
        Command::Figure1(o) => commands::figure1(o.merge(config::load(cfg)?), &out),
        Command::Figure2(o) => commands::figure2(o.merge(config::load(cfg)?), &out),
        Command::Curves(o) => commands::curves(o.merge(config::load(cfg)?), &out),
        Command::Process(o) => {
            let base = if o.grain.is_some() { &here } else { &config_dir };
            commands::process(o.merge(config::load(cfg)?), base, &out)
        }
        Command::Selfcheck(o) => commands::selfcheck(o.merge(config::load(cfg)?), &out),
    })
}
