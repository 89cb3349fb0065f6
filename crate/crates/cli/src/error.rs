use std::fmt;

use multiphase::analysis::AnalysisError;
use multiphase::config::ConfigError;
use multiphase::diagnostics::DiagnosticsError;
use multiphase::model::ModelError;
use multiphase::solver::SolverError;

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or environment: exit code 2.
    Config(String),
    /// The computation itself failed: exit code 1.
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::config(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e)
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Mesh(_)
            | SolverError::Shape(_)
            | SolverError::Config(_)
            | SolverError::InitialData(_)
            | SolverError::NotSimulatable(_) => CliError::config(e),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Run { .. } => CliError::Numerical(e.to_string()),
            DiagnosticsError::Solver(s) => s.into(),
            other => CliError::config(other),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::config(e)
    }
}
