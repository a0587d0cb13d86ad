//! `jumplab`: theory predictions and simulation experiments for steady-state
//! evolutionary algorithms on Jump-type benchmarks.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 validation failure.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use settings::{flag_values, keys_of, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] jumplab::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: line {line}: {message}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("violated hypotheses: {}", .0.join("; "))]
    Preconditions(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_validation() => 1,
            CliError::Io { .. } | CliError::Output(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "jumplab",
    version,
    about = "Diversity drift and runtime experiments on Jump benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every closed-form prediction for one parameter set as JSON.
    Predict(PredictArgs),
    /// Measure the one-generation change of the diversity.
    Drift(DriftArgs),
    /// Long runs on the trapped plateau; time-averaged diversity.
    Equilibrium(EquilibriumArgs),
    /// Repeated runs until the optimum is found or the budget runs out.
    Runtime(RuntimeArgs),
    /// Drift on the two-cluster population with one and with many crossover offspring.
    Counterexample(CounterexampleArgs),
    /// Chance that crossover plus mutation hits the optimum or clears an offset valley.
    Hitprob(HitprobArgs),
}

/// Flags shared by every experiment.
#[derive(Debug, Args, Serialize)]
struct RunArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Master seed; a random one is chosen and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path (default: no CSV).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path (default: stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Plateau parameters shared by the theory-driven commands.
#[derive(Debug, Args, Serialize)]
struct ProblemArgs {
    /// String length.
    #[arg(long)]
    n: Option<usize>,
    /// Gap size.
    #[arg(long)]
    k: Option<usize>,
    /// Population size.
    #[arg(long)]
    mu: Option<usize>,
    /// Expected number of flipped bits per mutation.
    #[arg(long)]
    chi: Option<f64>,
    /// Crossover probability.
    #[arg(long)]
    pc: Option<f64>,
    /// Competing crossover offspring (default: derived from k, chi, mu, pc).
    #[arg(long)]
    lambda_c: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// JSON output path (default: stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    /// Target precision of the diversity event (default: 1/(16k)).
    #[arg(long)]
    eps: Option<f64>,
    /// Derive eps, pc, mu and lambda_c instead of taking them as given.
    #[arg(long, value_parser = ["manual", "specialized", "search"])]
    preset: Option<String>,
    /// Grid size of the eps scan used by `--preset search`.
    #[arg(long)]
    search_steps: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct DriftArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_parser = ["ea", "ga"])]
    algorithm: Option<String>,
    #[arg(long, value_parser = ["jump_prime", "jump"])]
    fitness: Option<String>,
    #[arg(long, value_parser = ["standard", "paired", "radius"])]
    mutation: Option<String>,
    /// Ones (and zeros) flipped by paired mutation.
    #[arg(long)]
    ell: Option<usize>,
    /// Bits flipped by fixed-radius mutation.
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, value_parser = ["uniform", "balanced", "boring"])]
    crossover: Option<String>,
    #[arg(long, value_parser = ["all", "crossover-only", "mutation-only", "accepted-on-plateau"])]
    conditioning: Option<String>,
    /// Starting population.
    #[arg(long, value_parser = ["random", "cluster", "counterexample", "file"])]
    population: Option<String>,
    /// Population file for `--population file`: one genotype per line.
    #[arg(long)]
    population_file: Option<PathBuf>,
    /// Bit swaps away from a common centre for `--population cluster`.
    #[arg(long)]
    spread: Option<usize>,
    /// Independent single generations to average.
    #[arg(long)]
    samples: Option<u64>,
    /// Also compute the exact expectation by enumeration.
    #[arg(long)]
    exact: Option<bool>,
}

#[derive(Debug, Args, Serialize)]
pub struct EquilibriumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_parser = ["ea", "ga"])]
    algorithm: Option<String>,
    #[arg(long, value_parser = ["uniform", "balanced", "boring"])]
    crossover: Option<String>,
    #[arg(long, value_parser = ["plateau_random", "plateau_clone"])]
    init: Option<String>,
    /// Precision of the diversity threshold (default: 1/(16k)).
    #[arg(long)]
    eps: Option<f64>,
    /// Generations discarded before averaging (default: 1e5 for the EA, tau0 for the GA).
    #[arg(long)]
    burn_in: Option<u64>,
    /// Generations averaged.
    #[arg(long)]
    horizon: Option<u64>,
    /// Independent runs.
    #[arg(long)]
    trials: Option<u64>,
    /// Treat violated runtime-bound hypotheses as errors.
    #[arg(long)]
    strict: Option<bool>,
}

#[derive(Debug, Args, Serialize)]
pub struct RuntimeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_parser = ["jump", "jump_prime", "onemax", "jump_offset", "hurdle"])]
    fitness: Option<String>,
    /// Hurdle width.
    #[arg(long)]
    w: Option<usize>,
    /// Jump offset.
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long, value_parser = ["ea", "ga"])]
    algorithm: Option<String>,
    #[arg(long, value_parser = ["uniform", "balanced", "boring"])]
    crossover: Option<String>,
    #[arg(long, value_parser = ["uniform", "plateau_random", "plateau_clone", "bounded_zeros"])]
    init: Option<String>,
    /// Zero-count cap for `--init bounded_zeros`.
    #[arg(long)]
    max_zeros: Option<usize>,
    /// Derive pc, mu and lambda_c from the runtime-bound hypotheses.
    #[arg(long, value_parser = ["manual", "specialized", "search"])]
    preset: Option<String>,
    /// Grid size of the eps scan used by `--preset search`.
    #[arg(long)]
    search_steps: Option<usize>,
    /// Evaluation budget per run.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    repetitions: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct HitprobArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: RunArgs,
    #[arg(long, value_parser = ["opt", "offset"])]
    mode: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    chi: Option<f64>,
    /// Half the Hamming distance of the generated parent pair (default: k).
    #[arg(long)]
    d: Option<usize>,
    /// Two-line parent file overriding the generated pair.
    #[arg(long)]
    parents_file: Option<PathBuf>,
    /// Offsets for `--mode offset`, comma separated (default: 1..=k).
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
}

fn settings_for<A: Args + Serialize>(
    config: Option<&PathBuf>,
    args: &A,
) -> Result<Settings, CliError> {
    Settings::load(
        config.map(PathBuf::as_path),
        flag_values(args),
        &keys_of::<A>(),
    )
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Predict(a) => commands::predict(settings_for(a.config.as_ref(), &a)?),
        Command::Drift(a) => commands::drift(settings_for(a.run.config.as_ref(), &a)?),
        Command::Equilibrium(a) => commands::equilibrium(settings_for(a.run.config.as_ref(), &a)?),
        Command::Runtime(a) => commands::runtime(settings_for(a.run.config.as_ref(), &a)?),
        Command::Counterexample(a) => {
            commands::counterexample(settings_for(a.run.config.as_ref(), &a)?)
        }
        Command::Hitprob(a) => commands::hitprob(settings_for(a.run.config.as_ref(), &a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
