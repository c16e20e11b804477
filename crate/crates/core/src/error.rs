use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::agents::AgentError;
use crate::arena::ArenaError;
use crate::dynamics::DynamicsError;
use crate::gl::{EvalError, SystemError};
use crate::modal::ParseError;
use crate::sandbox::SandboxError;
use crate::stochastic::StochasticError;

/// Process exit statuses of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// Unparsable input, bad configuration or an unknown name.
    Usage = 2,
    /// Well-formed input that violates a semantic requirement.
    Semantic = 3,
    /// An internal invariant failed.
    Internal = 4,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("internal error: {0}")]
    Internal(String),
}

fn system_code(e: &SystemError) -> ExitCode {
    match e {
        SystemError::NotFullyModalized { .. } => ExitCode::Semantic,
        _ => ExitCode::Usage,
    }
}

fn agent_code(e: &AgentError) -> ExitCode {
    match e {
        AgentError::UnknownAgent(_) | AgentError::Parse(_) => ExitCode::Usage,
        AgentError::NotFullyModalized { .. }
        | AgentError::UndeclaredAction { .. }
        | AgentError::DuplicateAction { .. }
        | AgentError::NoActions { .. } => ExitCode::Semantic,
        AgentError::System(_) => ExitCode::Internal,
    }
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::Usage(_) | Error::Read { .. } | Error::Parse(_) => ExitCode::Usage,
            Error::Write(_) | Error::Eval(_) | Error::Internal(_) => ExitCode::Internal,
            Error::System(e) => system_code(e),
            Error::Agent(e) => agent_code(e),
            Error::Arena(e) => match e {
                ArenaError::Agent(e) => agent_code(e),
                ArenaError::ActionSetMismatch { .. } => ExitCode::Semantic,
                ArenaError::Eval(_) | ArenaError::NotExactlyOneAction { .. } | ArenaError::SwapInconsistent { .. } => {
                    ExitCode::Internal
                }
            },
            Error::Sandbox(e) => match e {
                SandboxError::BadCharset | SandboxError::ZeroBudget => ExitCode::Usage,
                SandboxError::UnsupportedCondition { .. } => ExitCode::Semantic,
                SandboxError::Agent(e) => agent_code(e),
            },
            Error::Stochastic(e) => match e {
                StochasticError::Domain { .. } | StochasticError::UnknownMode(_) => ExitCode::Usage,
                StochasticError::Unverified => ExitCode::Internal,
            },
            Error::Dynamics(e) => match e {
                DynamicsError::UnknownAction(_)
                | DynamicsError::UnknownAgent(_)
                | DynamicsError::NonpositiveFitness { .. } => ExitCode::Semantic,
                _ => ExitCode::Usage,
            },
        }
    }
}
