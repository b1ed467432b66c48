use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch")]
    GridMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("charge support exceeds box margin (2*R_rho = {diameter}, limit L/2 = {limit})")]
    SupportTooLarge { diameter: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rotation matrix is not orthogonal with determinant +1")]
    NotARotation,

    #[error("blow-up detected: reduce dt (t = {t})")]
    BlowUp { t: f64 },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
