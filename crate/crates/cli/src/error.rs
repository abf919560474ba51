use std::fmt;

use dislosim_core::Error as CoreError;

/// Exit classes of the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Invariant,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError { kind: Kind::Config, message: msg.into() }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        CliError { kind: Kind::Invariant, message: msg.into() }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError { kind: Kind::Numerical, message: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Config => 2,
            Kind::Invariant => 3,
            Kind::Numerical => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            Kind::Config => "config error",
            Kind::Invariant => "invariant violation",
            Kind::Numerical => "numerical failure",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidInput(_) | CoreError::Parse { .. } | CoreError::Io(_) => CliError::config(msg),
            CoreError::Invariant(_) => CliError::invariant(msg),
            CoreError::BranchCut { .. }
            | CoreError::CoreSingularity { .. }
            | CoreError::ScrewSingularity { .. }
            | CoreError::Cfl { .. }
            | CoreError::NonConvergence { .. }
            | CoreError::Quadrature { .. } => CliError::numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("i/o: {e}"))
    }
}
