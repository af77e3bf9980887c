use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: line {line}: {reason}")]
    Input {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Core(#[from] qinterf::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use qinterf::Error as E;
        match self {
            Self::Config(_) | Self::Input { .. } => exit::CONFIG,
            Self::Io { .. } => exit::IO,
            Self::Core(
                E::EigenNoConvergence { .. }
                | E::NotUnitary { .. }
                | E::GroupResidual { .. }
                | E::NotReal { .. }
                | E::FitWindow { .. },
            ) => exit::NUMERICAL,
            Self::Core(_) => exit::CONFIG,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let config = CliError::config("x").exit_code();
        let numerical = CliError::from(qinterf::Error::EigenNoConvergence { dim: 4 }).exit_code();
        let io = CliError::io("p", std::io::Error::other("x")).exit_code();
        assert_eq!(
            [config, numerical, io],
            [exit::CONFIG, exit::NUMERICAL, exit::IO]
        );
        assert_eq!(
            CliError::from(qinterf::Error::BinningMismatch).exit_code(),
            exit::CONFIG
        );
    }
}
