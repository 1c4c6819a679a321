use thiserror::Error;

use crate::cellset::CellSet;
use crate::reversibility::NonInjectivityWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must have at least two symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("track sizes {tracks:?} have product {product}, expected alphabet size {size}")]
    TrackMismatch {
        tracks: Vec<usize>,
        product: usize,
        size: usize,
    },

    #[error("rule table has {got} entries, expected {expected} (q^{arity})")]
    TableSizeMismatch {
        expected: usize,
        got: usize,
        arity: usize,
    },

    #[error("table entry {symbol} is not a symbol of a {size}-letter alphabet")]
    SymbolOutOfRange { symbol: u32, size: usize },

    #[error("alphabets differ ({left} vs {right} symbols)")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("operation needs a table of {required} entries, over the cap of {cap}; raise the table cap to proceed")]
    TableTooLarge { required: u128, cap: u64 },

    #[error("operation needs {required} evaluations, over the cap of {cap}; raise the evaluation cap to proceed")]
    TooLarge { required: u128, cap: u64 },

    #[error("rule is not injective on bi-infinite configurations")]
    NotReversible { witness: Box<NonInjectivityWitness> },

    #[error("no inverse rule found within radius {max_radius}; retry with a larger radius cap")]
    RadiusCapExceeded { max_radius: u32 },

    #[error("pattern does not cover the rule window: missing cells {missing}")]
    InsufficientSupport { missing: CellSet },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("verification failed: {0}")]
    Violation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionFailed(msg.into())
    }

    pub(crate) fn violation(msg: impl Into<String>) -> Self {
        Error::Violation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
