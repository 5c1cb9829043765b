use std::path::{Path, PathBuf};

use subtile::conformity::ConformityError;
use subtile::ctc::CtcError;
use subtile::project::ProjectionError;
use subtile::srt::SrtError;
use subtile::subtitle::SubtitleError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VIOLATIONS: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Posteriors { path: PathBuf, source: CtcError },
    #[error("{path}: {source}")]
    Srt { path: PathBuf, source: SrtError },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Alignment(CtcError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Conformity(#[from] ConformityError),
    #[error(transparent)]
    Subtitle(#[from] SubtitleError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Alignment(CtcError::InfeasibleAlignment { .. }) => exit::INFEASIBLE,
            _ => exit::INPUT,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn input(path: &Path, message: impl std::fmt::Display) -> CliError {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}
