use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite coordinate {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("chain must have at least one vertex")]
    EmptyChain,

    #[error("invalid paired walk: {0}")]
    InvalidWalk(String),

    #[error("oracle input too large: {k}x{l} = {} vertex pairs exceeds {limit}", k * l)]
    TooLargeForOracle { k: usize, l: usize, limit: usize },

    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("site set is empty")]
    EmptySiteSet,

    #[error("duplicate chain id {id:?}{}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    DuplicateId { id: String, line: Option<usize> },

    #[error("invalid slice: {0}")]
    InvalidSlice(String),

    #[error("slice needs {samples} samples, budget is {budget}")]
    BudgetExceeded { samples: u128, budget: u64 },

    #[error("point {point:?} lies outside the hypercube [-{bound}, {bound}]^k")]
    OutOfHypercube { point: Vec<f64>, bound: f64 },

    #[error("t({i},{j}) has no real solution (requires i >= j + 1)")]
    ComplexVertex { i: usize, j: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported output format: {0}")]
    UnsupportedFormat(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
