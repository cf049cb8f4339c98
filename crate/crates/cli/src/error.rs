// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, field {field}: cannot parse {value:?} as a number")]
    Parse {
        path: PathBuf,
        line: u64,
        field: usize,
        value: String,
    },
    #[error("{path}: line {line} has {got} fields, expected {expected}")]
    NonRectangular {
        path: PathBuf,
        line: u64,
        expected: usize,
        got: usize,
    },
    #[error("{path}: line {line}, field {field}: value {value:?} is not finite")]
    NonFinite {
        path: PathBuf,
        line: u64,
        field: usize,
        value: String,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] mxpbf::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mxpbf::Error as E;
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Io { .. }
            | Self::Parse { .. }
            | Self::NonRectangular { .. }
            | Self::NonFinite { .. }
            | Self::Format { .. } => exit::DATA,
            Self::Core(e) => match e {
                E::InvalidParameter(_)
                | E::InvalidLadder(_)
                | E::InfeasibleScenario(_)
                | E::InfeasibleWindow { .. }
                | E::LadderInfeasible { .. } => exit::USAGE,
                E::DegenerateVariance | E::NoFeasibleAlpha { .. } | E::NotPositiveDefinite => exit::NUMERIC,
                _ => exit::DATA,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
