use thiserror::Error;

/// Errors produced by the library.
///
/// The variants fall into three families that the CLI maps onto distinct
/// exit codes: validation problems with user input, parse failures, and
/// numerical failures inside a solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("loss entry {value} out of range [0,1] (player {player}, index {index})")]
    LossOutOfRange {
        player: usize,
        index: usize,
        value: f64,
    },

    #[error("observed loss {value} at index {index} outside the admissible range")]
    ObservedLossOutOfRange { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("not a probability vector: {0}")]
    NotSimplex(String),

    #[error("transition matrix invalid: {0}")]
    InvalidMatrix(String),

    #[error("matrix entry ({row},{col}) = {value} is not strictly positive")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("size {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("observe_loss called before next_strategy in this round")]
    MissingStrategy,

    #[error("stationary solve failed: residual {residual:e} after fallback")]
    StationaryResidual { residual: f64 },

    #[error("numerical failure at round {round}: {source}")]
    AtRound {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StationaryResidual { .. } => true,
            Error::AtRound { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn mismatch(what: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            got,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
