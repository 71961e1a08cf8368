use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Feller condition violated: 2*kappa*theta = {lhs} <= sigma^2 = {rhs} (set allow_feller_violation to override)")]
    FellerViolation { lhs: f64, rhs: f64 },

    #[error("complex branch tracking failed near p = {at}")]
    BranchTracking { at: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("density value {value:e} at x = {x} is negative beyond rounding")]
    NegativeDensity { x: f64, value: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("step-size control failed: {halvings} halvings at v = {v}")]
    StepSize { v: f64, halvings: u32 },

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) | Error::FellerViolation { .. } => ErrorKind::Validation,
            Error::Parse { .. }
            | Error::Data(_)
            | Error::Io { .. }
            | Error::Json(_)
            | Error::InsufficientData(_)
            | Error::Degenerate(_) => ErrorKind::Data,
            Error::BranchTracking { .. }
            | Error::Quadrature(_)
            | Error::NegativeDensity { .. }
            | Error::StepSize { .. }
            | Error::NonConvergence(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
