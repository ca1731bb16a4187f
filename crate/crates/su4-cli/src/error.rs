use std::process::ExitCode;

use su4_core::benchmark::BenchmarkError;
use su4_core::compiler::CompileError;
use su4_core::sim::SimError;
use su4_core::tomography::TomographyError;

/// Exit codes: 1 I/O and internal errors, 2 malformed or invalid input,
/// 3 non-unitary matrix, 4 verification failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("matrix is not unitary (residual {residual:e} exceeds {tolerance:e})")]
    NonUnitary { residual: f64, tolerance: f64 },
    #[error("verification failed: distance {distance:e} exceeds tolerance {tolerance:e}")]
    Verify { distance: f64, tolerance: f64 },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io { .. } | CliError::Internal(_) => 1,
            CliError::Parse(_) | CliError::Invalid(_) => 2,
            CliError::NonUnitary { .. } => 3,
            CliError::Verify { .. } => 4,
        })
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::NonUnitary(r) => CliError::NonUnitary { residual: r, tolerance: f64::NAN },
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Compile(c) => c.into(),
            SimError::InvalidNoise(m) => CliError::Invalid(format!("noise model: {m}")),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<TomographyError> for CliError {
    fn from(e: TomographyError) -> Self {
        match e {
            TomographyError::MissingSetting(_)
            | TomographyError::DuplicateSetting(_)
            | TomographyError::NoCounts
            | TomographyError::WrongInputCount(_) => CliError::Invalid(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<BenchmarkError> for CliError {
    fn from(e: BenchmarkError) -> Self {
        match e {
            BenchmarkError::NotDivisible(_) => CliError::Invalid(e.to_string()),
            BenchmarkError::Sim(s) => s.into(),
            BenchmarkError::Tomography(t) => t.into(),
        }
    }
}
