use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid scenario: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {reason}")]
    Field { field: String, reason: String },

    #[error(transparent)]
    Core(#[from] relaycf_core::Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0} verification suite(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    /// 2 for problems with the input, 3 for numerical or internal failures.
    pub fn exit_code(&self) -> u8 {
        use relaycf_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Parse(_) | CliError::Field { .. } => 2,
            CliError::Core(
                E::InvalidConfig { .. }
                | E::InvalidDistribution { .. }
                | E::AlphabetTooLarge { .. }
                | E::UnknownScheme(_)
                | E::InvalidGrid(_)
                | E::Json(_),
            ) => 2,
            CliError::Core(_) | CliError::Write { .. } | CliError::VerifyFailed(_) => 3,
        }
    }
}
