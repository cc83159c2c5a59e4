use pathamp_core::{ActionError, OracleError, TwinSlitError, ValidationError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Singular(String),
    #[error("{0}")]
    Resonance(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Singular(_) => 3,
            CliError::Resonance(_) => 4,
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ActionError> for CliError {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::SingularAction { .. } => CliError::Singular(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Action(a) => a.into(),
            OracleError::NonConvergent { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TwinSlitError> for CliError {
    fn from(e: TwinSlitError) -> Self {
        match e {
            TwinSlitError::ResonantCoupling { .. } => CliError::Resonance(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}
