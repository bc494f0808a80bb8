//! Errors that stop a command, sorted into the exit-code taxonomy.

use serde::Serialize;

use ebltl::ltl::CheckError;
use ebltl::oracle::OracleError;
use ebltl::preserve::{BetaError, PreserveError};
use ebltl::refine::{ChainError, LevelError};
use ebltl::sem::SemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Bad arguments or unreadable input.
    Usage,
    /// The input does not parse or typecheck.
    Parse,
    /// The model itself misbehaves: invariant or domain violation, infeasible event.
    Model,
    /// A state, product or enumeration limit was hit.
    Bound,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { kind: FailureKind::Usage, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Failure {
        Failure { kind: FailureKind::Parse, message: message.into() }
    }
}

impl From<SemError> for Failure {
    fn from(e: SemError) -> Failure {
        let kind = match &e {
            SemError::Parse(_) => FailureKind::Parse,
            SemError::StateLimit { .. } => FailureKind::Bound,
            _ => FailureKind::Model,
        };
        Failure { kind, message: e.to_string() }
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Failure {
        match e {
            ChainError::Sem(s) => s.into(),
            ChainError::Io { .. } => Failure::usage(e.to_string()),
            _ => Failure::parse(e.to_string()),
        }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Failure {
        Failure { kind: FailureKind::Bound, message: e.to_string() }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        Failure { kind: FailureKind::Bound, message: e.to_string() }
    }
}

impl From<LevelError> for Failure {
    fn from(e: LevelError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<BetaError> for Failure {
    fn from(e: BetaError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<PreserveError> for Failure {
    fn from(e: PreserveError) -> Failure {
        match e {
            PreserveError::Sem(s) => s.into(),
            PreserveError::Check(c) => c.into(),
            PreserveError::Level(l) => l.into(),
            PreserveError::LastLevel { .. } => Failure::usage(e.to_string()),
        }
    }
}
