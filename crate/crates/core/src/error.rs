use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a unit: {0}")]
    NonUnit(String),

    #[error("input is not symmetric in the {0} roots")]
    SymmetryViolation(String),

    #[error("unsatisfiable relation: {0}")]
    UnsatisfiableRelation(String),

    #[error("missing Chern number for {monomial} on {manifold}")]
    MissingChernNumber { monomial: String, manifold: String },

    #[error("contract not applicable: {0}")]
    ContractNotApplicable(String),

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
