use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not a basis element i^l B1 x ... x Bm")]
    NotInBasis,

    #[error("duplicate vector {0}")]
    DuplicateVector(String),

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible rate: {0}")]
    InfeasibleRate(String),

    #[error("inconsistent plan: {0}")]
    Plan(String),

    #[error("signal set: {0}")]
    Signal(String),

    #[error("codebook too large for exhaustive search: {0} codewords")]
    CodebookTooLarge(u128),

    #[error("no grid angle achieves full diversity")]
    NoFullDiversity,

    #[error("weight matrix {0} is singular")]
    SingularWeight(usize),

    #[error("constellation growth failed for symbol {0}")]
    GrowthFailed(usize),

    #[error("unknown catalog entry: {0}")]
    UnknownCatalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
