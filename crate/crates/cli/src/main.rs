//! `tbell`: seeded, reproducible temporal Bell experiments.
//!
//! Every run prints one document holding a manifest (command, resolved
//! parameters, seed, shard count, tool version) and the results. Exit codes:
//! 0 on success, 2 on input errors, 3 when a physical invariant is violated.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tbell::Execution;

use output::Format;
use settings::parse_triple;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Invariant(tbell::Error),
}

impl From<tbell::Error> for CliError {
    fn from(e: tbell::Error) -> Self {
        Self::Invariant(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Invariant(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(msg) => write!(f, "input error: {msg}"),
            Self::Invariant(e) => write!(f, "invariant violation: {e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tbell",
    version,
    about = "Temporal Bell inequality experiments on a qubit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed; shard i draws from substream (seed, i).
    #[arg(long, env = "TBELL_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of Monte Carlo shards [default: available parallelism].
    #[arg(long, env = "TBELL_SHARDS", value_parser = clap::value_parser!(u64).range(1..))]
    shards: Option<u64>,
    #[arg(long, env = "TBELL_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, env = "TBELL_OUTPUT")]
    output: Option<PathBuf>,
    /// Run shards on the current thread (results are identical).
    #[arg(long, env = "TBELL_SEQUENTIAL")]
    sequential: bool,
}

impl Common {
    fn shards(&self) -> usize {
        self.shards
            .map_or_else(tbell::exec::default_shards, |s| s as usize)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correlations of a sequential measurement chain read from a TOML file.
    Correlate(CorrelateArgs),
    /// Temporal CHSH value: analytic, Monte Carlo and optimized.
    Chsh(ChshArgs),
    /// The one-bit memory game played with a measured qubit.
    Game(GameArgs),
    /// Exhaustive classical (local hidden variable) maxima.
    Lhv(LhvArgs),
    /// Spatial CHSH sum bound for three-qubit states.
    Spatial(SpatialArgs),
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Chain file with [[steps]] entries.
    #[arg(env = "TBELL_SETTINGS")]
    settings: PathBuf,
    /// Initial Bloch vector "x,y,z" (|r| <= 1) [default: file value, else 0,0,0].
    #[arg(long, env = "TBELL_INITIAL", value_parser = parse_triple, allow_hyphen_values = true)]
    initial: Option<[f64; 3]>,
    /// 1-based steps whose outcome product is reported [default: file value, else all].
    #[arg(long, env = "TBELL_SELECT", value_delimiter = ',')]
    select: Option<Vec<usize>>,
    #[arg(long, env = "TBELL_TRIALS", default_value_t = 100_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Skip Monte Carlo sampling.
    #[arg(long, env = "TBELL_EXACT")]
    exact: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// First setting at the second time, "x,y,z".
    #[arg(long, env = "TBELL_B1", value_parser = parse_triple, allow_hyphen_values = true,
          default_value = "1,0,0")]
    b1: [f64; 3],
    /// Second setting at the second time, "x,y,z".
    #[arg(long, env = "TBELL_B2", value_parser = parse_triple, allow_hyphen_values = true,
          default_value = "0,0,1")]
    b2: [f64; 3],
    /// First setting at the first time (ignored with --optimize).
    #[arg(long, env = "TBELL_A1", value_parser = parse_triple, allow_hyphen_values = true,
          required_unless_present = "optimize")]
    a1: Option<[f64; 3]>,
    /// Second setting at the first time (ignored with --optimize).
    #[arg(long, env = "TBELL_A2", value_parser = parse_triple, allow_hyphen_values = true,
          required_unless_present = "optimize")]
    a2: Option<[f64; 3]>,
    /// Choose a1, a2 optimally for b1, b2 and run the numerical search.
    #[arg(long, env = "TBELL_OPTIMIZE")]
    optimize: bool,
    /// Also report the sum over two consecutive segments with these settings.
    #[arg(long, env = "TBELL_SUM")]
    sum: bool,
    #[arg(long, env = "TBELL_TRIALS", default_value_t = 100_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Restarts of the numerical search.
    #[arg(long, env = "TBELL_RESTARTS", default_value_t = 32,
          value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("settings").required(true).args(["quad", "optimal"]))]
pub struct GameArgs {
    /// TOML file with a1, a2, b1, b2.
    #[arg(long, env = "TBELL_QUAD")]
    quad: Option<PathBuf>,
    /// Use the settings that reach the quantum optimum.
    #[arg(long, env = "TBELL_OPTIMAL")]
    optimal: bool,
    #[arg(long, env = "TBELL_TRIALS", default_value_t = 100_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LhvTarget {
    Chsh,
    Game,
}

#[derive(Debug, Args)]
pub struct LhvArgs {
    #[arg(long, env = "TBELL_TARGET", value_enum)]
    target: LhvTarget,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpatialState {
    Ghz,
    SingletX,
    Random,
}

#[derive(Debug, Args)]
pub struct SpatialArgs {
    #[arg(long, env = "TBELL_STATE", value_enum, default_value_t = SpatialState::Random)]
    state: SpatialState,
    /// Haar-random states in the sweep (with --state random).
    #[arg(long, env = "TBELL_SAMPLES", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (doc, common) = match &cli.command {
        Command::Correlate(a) => (commands::correlate(a)?, &a.common),
        Command::Chsh(a) => (commands::chsh(a)?, &a.common),
        Command::Game(a) => (commands::game(a)?, &a.common),
        Command::Lhv(a) => (commands::lhv(a), &a.common),
        Command::Spatial(a) => (commands::spatial(a)?, &a.common),
    };
    let text = doc.render(common.format);
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tbell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
