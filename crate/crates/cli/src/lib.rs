//! Scenario runner behind the `qb` binary. Each command turns a [`Config`]
//! into CSV (or JSON for `cost`) text; `main.rs` only handles I/O.

pub mod commands;
pub mod config;
pub mod output;

pub use config::Config;

use qbattery::QbError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Model(QbError),
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) => match e {
                QbError::InvalidParameter(_)
                | QbError::InvalidLevels { .. }
                | QbError::OutsidePulseWindow { .. }
                | QbError::InvalidState(_) => 2,
                QbError::Divergence { .. } | QbError::PropagatorMismatch(_) | QbError::NonFinite(_) => 3,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<QbError> for CliError {
    fn from(e: QbError) -> Self {
        CliError::Model(e)
    }
}
