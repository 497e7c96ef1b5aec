//! `nmdiscord`: trajectories, sweeps, validation and event detection for two
//! qubits under non-Markovian amplitude damping.
//!
//! Times are in units of `1/gamma0` and `--lambda` is `lambda / gamma0`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmdiscord_core::Environment;

#[derive(Parser, Debug)]
#[command(name = "nmdiscord", version, about = "Quantum discord of two qubits under non-Markovian amplitude damping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trajectory and write it as CSV or JSON.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one trajectory per parameter value, in parallel.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values; an empty string gives an empty sweep.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Directory for the outputs and `manifest.json`.
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads (default: number of processors).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in oracle suites.
    Validate {
        /// Seed for the randomized states.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Scale the pseudomode coupling in the calibration suite.
        #[arg(long, hide = true, default_value_t = 1.0)]
        perturb_omega: f64,
        /// Negate the D2 conditional entropy in the analytic discord.
        #[arg(long, hide = true)]
        flip_d2_sign: bool,
    },
    /// Re-run event detection on a trajectory CSV.
    Events {
        /// CSV written by `simulate`.
        #[arg(long)]
        input: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, value_enum)]
    env: EnvArg,
    /// Weight of |00> in the initial state (not needed when sweeping it).
    #[arg(long)]
    alpha2: Option<f64>,
    /// Reservoir width in units of gamma0 (not needed when sweeping it).
    #[arg(long = "lambda")]
    lambda_over_gamma0: Option<f64>,
    #[arg(long = "t-max")]
    t_max: f64,
    #[arg(long)]
    dt: f64,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Output format (default: from the file extension, else csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Attach an event report (embedded in JSON, `<stem>.events.json` next to CSV).
    #[arg(long)]
    events: bool,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Args, Debug, Clone, Copy)]
struct ToleranceArgs {
    /// Discord (bits) treated as zero.
    #[arg(long, default_value_t = 1e-6)]
    discord_tol: f64,
    /// Concurrence treated as zero.
    #[arg(long, default_value_t = 1e-9)]
    concurrence_tol: f64,
    /// Discord (bits) that marks a sudden birth.
    #[arg(long, default_value_t = 0.01)]
    birth_threshold: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EnvArg {
    Independent,
    Common,
}

impl From<EnvArg> for Environment {
    fn from(e: EnvArg) -> Self {
        match e {
            EnvArg::Independent => Environment::Independent,
            EnvArg::Common => Environment::Common,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    Alpha2,
    #[value(name = "lambda", alias = "lambda_over_gamma0")]
    Lambda,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { run, out } => commands::simulate(&run, &out),
        Command::Sweep { run, param, values, out_dir, jobs } => commands::sweep(&run, param, &values, &out_dir, jobs),
        Command::Validate { seed, perturb_omega, flip_d2_sign } => {
            commands::validate(seed, perturb_omega, flip_d2_sign)
        }
        Command::Events { input, out, tolerances } => commands::events(&input, out.as_deref(), &tolerances),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
