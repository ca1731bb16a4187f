//! `su4c`: compile two-qubit unitaries into pulse programs and benchmark them
//! with simulated tomography.

mod commands;
mod error;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use su4_core::tolerance::Tolerances;
use su4_core::tomography::Method;

use crate::commands::{out_path, BenchmarkArgs, ProcessTomoArgs, SimulateArgs};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "su4c", version, about = "Two-qubit gate compiler and benchmark tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Verification tolerance (phase-invariant max-norm distance).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Largest ‖U†U − I‖ accepted for input matrices before projecting them
    /// onto the closest unitary.
    #[arg(long, global = true)]
    unitarity_tolerance: Option<f64>,
    /// Tolerance overrides: a number, or `unitarity=…,verify=…`.
    #[arg(long = "tolerance-env", env = "SU4C_TOLERANCE", hide = true, global = true)]
    env_tolerance: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Linear,
    Mle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Linear => Method::Linear,
            MethodArg::Mle => Method::Mle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a unitary into circuit parameters.
    Compile {
        /// Matrix JSON file.
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Lower circuit parameters to a pulse sequence.
    Lower {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check circuit parameters against a unitary.
    Verify {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Unitary of a circuit parameter file.
    Unitary {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Haar-random SU(4) matrices.
    Sample {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate the nine-setting measurement of one operation.
    Simulate {
        #[arg(long)]
        unitary: PathBuf,
        /// Input state, e.g. `minus_i,down`.
        #[arg(long)]
        input: String,
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct a density matrix from measurement records.
    Reconstruct {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_enum, default_value = "mle")]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized benchmark over Haar-random operations.
    Benchmark {
        #[arg(long, default_value_t = 160)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        shots: u64,
        #[arg(long, value_enum, default_value = "mle")]
        method: MethodArg,
        /// Use exact outcome probabilities instead of sampled counts.
        #[arg(long)]
        exact: bool,
        /// Also write per-operation fidelities as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0.02)]
        bin_width: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Process tomography of one operation.
    ProcessTomo {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mle")]
        method: MethodArg,
        #[arg(long)]
        exact: bool,
        /// Skip the completely-positive projection.
        #[arg(long)]
        no_cp: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn tolerances(c: &Common) -> Result<Tolerances, CliError> {
    let mut t = commands::tolerances_from_env(c.env_tolerance.as_deref())?;
    let positive = |x: f64, flag: &str| {
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(CliError::Parse(format!("{flag} must be positive")))
        }
    };
    if let Some(v) = c.tolerance {
        t.verify = positive(v, "--tolerance")?;
    }
    if let Some(v) = c.unitarity_tolerance {
        t.unitarity = positive(v, "--unitarity-tolerance")?;
    }
    Ok(t)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compile { input, common } => commands::compile(&input, &tolerances(&common)?, out_path(&common.out)),
        Command::Lower { params, common } => commands::lower(&params, &tolerances(&common)?, out_path(&common.out)),
        Command::Verify { unitary, params, common } => {
            commands::verify_cmd(&unitary, &params, &tolerances(&common)?, out_path(&common.out))
        }
        Command::Unitary { params, common } => commands::unitary_of(&params, out_path(&common.out)),
        Command::Sample { n, seed, common } => commands::sample(n, seed, out_path(&common.out)),
        Command::Simulate { unitary, input, noise, shots, seed, common } => commands::simulate(
            &SimulateArgs { unitary: &unitary, input: &input, noise: noise.as_deref(), shots, seed },
            &tolerances(&common)?,
            out_path(&common.out),
        ),
        Command::Reconstruct { records, method, common } => {
            commands::reconstruct(&records, method.into(), &tolerances(&common)?, out_path(&common.out))
        }
        Command::Benchmark { n, seed, noise, shots, method, exact, csv, bin_width, common } => commands::benchmark(
            &BenchmarkArgs {
                n,
                seed,
                noise: noise.as_deref(),
                shots,
                method: method.into(),
                exact,
                csv: csv.as_deref(),
                bin_width,
            },
            &tolerances(&common)?,
            out_path(&common.out),
        ),
        Command::ProcessTomo { unitary, noise, shots, seed, method, exact, no_cp, common } => commands::process_tomo(
            &ProcessTomoArgs {
                unitary: &unitary,
                noise: noise.as_deref(),
                shots,
                seed,
                method: method.into(),
                exact,
                cp: !no_cp,
            },
            &tolerances(&common)?,
            out_path(&common.out),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su4c: {e}");
            e.exit_code()
        }
    }
}
