//! Batch front door for the bribery sandbox: loads a network-snapshot
//! config, runs named experiments, and writes CSV/JSON artifacts.
//!
//! Exit codes: `0` success, `1` runtime failure, `2` malformed input
//! (flags, chain strings, config or bids files), `3` a scenario whose
//! attack both the predicate and the simulation call failed.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod bias;
mod config;
mod output;
mod scenario;
mod sweep;

use config::RunConfig;

/// Deterministic proof-of-stake bribery sandbox: replay commitment
/// attacks, sweep their economics, and settle seed-bias auctions.
#[derive(Debug, Parser)]
#[command(name = "bribesim", version, about)]
struct Cli {
    /// Run-configuration file (TOML); defaults to the September-2025
    /// snapshot baked into the binary. Presets live under `configs/`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for emitted artifacts (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed echoed into report metadata. Every shipped experiment is
    /// deterministic, so this is reserved for randomized extensions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay one fork pattern against the simulated chain with escrowed
    /// bribes, writing a JSON report and a JSONL transcript.
    Scenario {
        /// Fork pattern, honest and adversary runs left to right:
        /// "H A^2" (fork the published block) or "A^2 H A" (prepared
        /// private branch).
        #[arg(long)]
        chain: String,
        /// Adversary stake share α, as a decimal ("0.3") or a fraction
        /// ("3/10").
        #[arg(long)]
        alpha: String,
        /// Bribable fraction β of the non-adversary stake, same formats.
        #[arg(long)]
        beta: String,
    },
    /// Run a grid sweep and write one CSV with the fixed header
    /// `alpha,beta_or_alpha_star,value,feasible`.
    Sweep {
        /// Which experiment to sweep.
        #[arg(value_enum)]
        experiment: Experiment,
    },
    /// Sell the last `k` slots of an epoch: enumerate withholding
    /// patterns, take bids, execute the winner on-chain, and settle.
    Bias {
        /// Number of controlled tail slots.
        #[arg(long)]
        k: usize,
        /// JSON bids file: a list of {"bidder", "pattern", "amount_gwei"}
        /// objects, `pattern` being `k` bits, earliest tail slot first,
        /// `1` = withhold.
        #[arg(long)]
        bids: PathBuf,
    },
}

/// Named sweep experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    /// Committee-bribery cost of a one-block fork over (α, β), in ETH.
    ExpostCost,
    /// Total exit-campaign cost over (α, α*), in USD.
    ExitBribe,
    /// Exit-queue duration over (α, α*), in days.
    ExitDuration,
    /// Fraction of simulated reorgs agreeing with the closed-form
    /// predicates over (α, β), both attack families, runs of 1–3 blocks.
    ReorgAgreement,
}

impl Experiment {
    fn file_stem(self) -> &'static str {
        match self {
            Experiment::ExpostCost => "expost-cost",
            Experiment::ExitBribe => "exit-bribe",
            Experiment::ExitDuration => "exit-duration",
            Experiment::ReorgAgreement => "reorg-agreement",
        }
    }
}

/// Error channel deciding the process exit code.
#[derive(Debug)]
enum CliError {
    /// Malformed user input: exits 2.
    Usage(String),
    /// Everything else: exits 1.
    Runtime(anyhow::Error),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(message) => write!(f, "{message}"),
            CliError::Runtime(error) => write!(f, "{error:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        CliError::Runtime(error)
    }
}

impl From<bribesim_core::attacks::AttackError> for CliError {
    fn from(error: bribesim_core::attacks::AttackError) -> Self {
        CliError::Runtime(error.into())
    }
}

impl From<bribesim_core::econ::EconError> for CliError {
    fn from(error: bribesim_core::econ::EconError) -> Self {
        CliError::Runtime(error.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        CliError::Runtime(error.into())
    }
}

/// Everything a command needs besides its own flags.
struct Ctx {
    config: RunConfig,
    out: PathBuf,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(error)) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    let config = config::load(cli.config.as_deref())?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", cli.out.display())))?;
    let ctx = Ctx {
        config,
        out: cli.out,
        seed: cli.seed,
    };
    match cli.command {
        Command::Scenario { chain, alpha, beta } => scenario::run(&ctx, &chain, &alpha, &beta),
        Command::Sweep { experiment } => sweep::run(&ctx, experiment),
        Command::Bias { k, bids } => bias::run(&ctx, k, &bids),
    }
}
