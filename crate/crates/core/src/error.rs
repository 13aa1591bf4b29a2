use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("angle {0} rad outside the open interval (-pi/2, pi/2)")]
    AngleDomain(f64),

    #[error("inner subarray is empty (n1 = 0), delta1 is undefined")]
    UndefinedNull,

    #[error("regime mismatch: n2 = {n2} must exceed n_ap = {n_ap} for n1 = {n1}")]
    Regime { n1: usize, n2: usize, n_ap: usize },

    #[error("no local minimum of the beam pattern on (0, 2]")]
    DegeneratePattern,

    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("zero channel vector cannot be normalised")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("virtual signal is not a contiguous lag range")]
    NonContiguous,

    #[error("resolved {} of {requested} sources", found.len())]
    UnderResolution { found: Vec<f64>, requested: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfiguration(_)
            | Error::Config { .. }
            | Error::Parse(_)
            | Error::AngleDomain(_)
            | Error::Regime { .. }
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
