use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] x0star::Error),

    #[error("missing fixtures for level {level}: {}", .paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    MissingData { level: u64, paths: Vec<PathBuf> },

    #[error("unknown table {0:?}")]
    UnknownTable(String),

    #[error("golden table {id}: {source}")]
    Golden { id: String, source: serde_json::Error },

    #[error("cache file {}: {source}", .path.display())]
    Cache { path: PathBuf, source: serde_json::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for missing or unusable input data, 3 for anything that points at a bug
    /// or an inconsistency in the data.
    pub fn exit_code(&self) -> i32 {
        use x0star::Error as E;
        match self {
            CliError::MissingData { .. } | CliError::UnknownTable(_) | CliError::Io(_) => 2,
            CliError::Core(
                E::MissingFixture(_)
                | E::Schema { .. }
                | E::MissingAp { .. }
                | E::NotSquarefree(_)
                | E::InvalidLevel(..)
                | E::InvalidDiscriminant(_)
                | E::InvalidArgument(_)
                | E::BadReduction { .. }
                | E::Io(_),
            ) => 2,
            _ => 3,
        }
    }
}
