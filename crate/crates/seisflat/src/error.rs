use std::path::PathBuf;

use seisflat_core::pipeline::StageError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: malformed volume at byte {offset}: {reason}", path.display())]
    Format { path: PathBuf, offset: u64, reason: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] seisflat_core::Error),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error("{failed} of {evaluated} verification rows failed")]
    VerificationFailed { failed: usize, evaluated: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Process exit code: 1 for invalid input, 2 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        use seisflat_core::Error as E;
        let numerical = |e: &E| matches!(e, E::ZeroRow { .. } | E::NoConvergence { .. } | E::DegenerateSpectrum(_));
        match self {
            Error::Core(e) if numerical(e) => 2,
            Error::Stage(e) if numerical(&e.source) => 2,
            Error::VerificationFailed { .. } => 2,
            _ => 1,
        }
    }
}
