//! Report envelope and exit-code mapping.

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub const SCHEMA: &str = "grsc-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
    BudgetExceeded,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::Unknown | Status::BudgetExceeded => 2,
            Status::Error => 3,
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
}

impl Outcome {
    pub fn new(holds: bool, result: impl Serialize) -> Self {
        Outcome { status: if holds { Status::Holds } else { Status::Fails }, result: to_value(result) }
    }

    pub fn with(status: Status, result: impl Serialize) -> Self {
        Outcome { status, result: to_value(result) }
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{message}")]
    Module { kind: &'static str, message: String },
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn module(kind: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Module { kind, message: e.to_string() }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input(_) => "input",
            CliError::Module { kind, .. } => kind,
            CliError::Budget(_) => "budget",
            CliError::Internal(_) => "internal",
        }
    }
}

#[derive(Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
}

pub enum Finished {
    Done(Outcome),
    Failed(CliError),
}

impl From<Result<Outcome, CliError>> for Finished {
    fn from(r: Result<Outcome, CliError>) -> Self {
        match r {
            Ok(o) => Finished::Done(o),
            Err(e) => Finished::Failed(e),
        }
    }
}

impl From<CliError> for Finished {
    fn from(e: CliError) -> Self {
        Finished::Failed(e)
    }
}

#[derive(Serialize)]
pub struct Toolkit {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct Envelope {
    pub schema: &'static str,
    pub toolkit: Toolkit,
    pub command: String,
    pub config: Value,
    pub status: Status,
    pub exit_code: u8,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Envelope {
    pub fn new(command: &str, config: Value, finished: &Finished) -> Self {
        let (status, result, error) = match finished {
            Finished::Done(o) => (o.status, o.result.clone(), None),
            Finished::Failed(e) => {
                let status = if matches!(e, CliError::Budget(_)) { Status::BudgetExceeded } else { Status::Error };
                (status, Value::Null, Some(ErrorRecord { kind: e.kind(), message: e.to_string() }))
            }
        };
        Envelope {
            schema: SCHEMA,
            toolkit: Toolkit { name: "grsc", version: env!("CARGO_PKG_VERSION") },
            command: command.to_string(),
            config,
            status,
            exit_code: status.exit_code(),
            result,
            error,
            elapsed_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serialises")
    }
}
