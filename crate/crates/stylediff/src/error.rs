use std::path::PathBuf;

/// Crate-wide error type.
///
/// The CLI maps these onto process exit codes: `Config` and `Domain` are
/// usage errors (2), `Dependency` means a required artifact from an earlier
/// pipeline stage is missing (3), everything else is a runtime failure (4).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A shape or invariant promised by the caller was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A required artifact from a previous pipeline stage does not exist.
    #[error("missing dependency: {stage} has not produced {path:?}; run `{stage}` first")]
    Dependency { stage: String, path: PathBuf },

    /// Training diverged or produced non-finite values.
    #[error("training failure: {0}")]
    Training(String),

    /// File IO, annotated with the path involved.
    #[error("io error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed data in a serialized artifact.
    #[error("parse error in {path:?}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Dependency { .. } => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
