use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition of an operation was violated by its caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("min/max reduction over an empty array")]
    EmptyReduction,

    #[error("prefix sum overflows the counter type at index {index}")]
    ScanOverflow { index: usize },

    #[error("phase {phase} panicked: {message}")]
    PhasePanicked { phase: usize, message: String },

    #[error("sort rate requires a positive mean time, got {0}")]
    NonPositiveTime(f64),

    #[error("no {missing} counterpart for {cell}")]
    UnmatchedCell { cell: String, missing: String },

    #[error("nothing to plot for {0}")]
    EmptyPlot(String),

    #[error("I/O error: {0}")]
    Io(String),
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
