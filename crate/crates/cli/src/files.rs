use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use csisdvs::artifact::{ArtifactError, ArtifactFile};
use thiserror::Error;

use crate::{EXIT_GAME_FAILED, EXIT_IO, EXIT_MALFORMED, EXIT_USAGE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Artifact { path: PathBuf, source: ArtifactError },
    #[error("{0}")]
    Malformed(String),
    #[error("{0} verdict(s) failed")]
    GameFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Artifact { .. } | CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::GameFailed(_) => EXIT_GAME_FAILED,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn artifact(path: &Path, source: ArtifactError) -> Self {
        CliError::Artifact { path: path.to_path_buf(), source }
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_artifact(path: &Path) -> Result<ArtifactFile, CliError> {
    ArtifactFile::from_bytes(&read_bytes(path)?).map_err(|e| CliError::artifact(path, e))
}

/// Writes an artifact; secret keys are created owner-read/write only.
pub fn write_artifact(path: &Path, file: &ArtifactFile) -> Result<(), CliError> {
    let mut options = fs::OpenOptions::new();
    options.write(true).create(true).truncate(true);
    #[cfg(unix)]
    if file.kind.is_secret() {
        use std::os::unix::fs::OpenOptionsExt;
        options.mode(0o600);
    }
    let mut f = options.open(path).map_err(|e| CliError::io(path, e))?;
    #[cfg(unix)]
    if file.kind.is_secret() {
        use std::os::unix::fs::PermissionsExt;
        // an existing file keeps its old mode on open
        f.set_permissions(fs::Permissions::from_mode(0o600)).map_err(|e| CliError::io(path, e))?;
    }
    f.write_all(&file.to_bytes()).map_err(|e| CliError::io(path, e))
}
