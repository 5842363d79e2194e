use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular Hankel system while building the [{order}/{order}] Padé approximant")]
    SingularHankel { order: usize },

    #[error("Padé poles are not simple: |b_{i} - b_{j}| = {gap:e}")]
    NonSimplePoles { i: usize, j: usize, gap: f64 },

    #[error("evaluation point {z} is within {dist:e} of pole b_{index}")]
    PoleProximity { z: String, index: usize, dist: f64 },

    #[error("argument {value} lies outside the principal domain (-1, inf)")]
    Domain { value: f64 },

    #[error("coefficients are already rotated (theta = {theta})")]
    AlreadyRotated { theta: f64 },

    #[error("zero pivot at row {row} of a tridiagonal system")]
    ZeroPivot { row: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("numerical instability at station {station}: {reason}")]
    Instability { station: usize, reason: String },

    #[error("config error at line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    ConfigInvalid(Vec<String>),

    #[error("bad field file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ConfigSyntax { .. } | Error::ConfigInvalid(_) | Error::InvalidArgument(_) => 2,
            Error::SingularHankel { .. }
            | Error::NonSimplePoles { .. }
            | Error::PoleProximity { .. }
            | Error::Domain { .. }
            | Error::ZeroPivot { .. }
            | Error::Instability { .. } => 3,
            _ => 1,
        }
    }
}
