use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain (zero inverse, non-prime modulus).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {what} exceeds {limit}")]
    SizeLimit { what: String, limit: u128 },

    /// A caller-supplied object violates the contract of the operation, e.g. a map that is not a group action.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("generation failure for {what}: expected order {expected}, closure reached {got}")]
    GenerationFailure { what: String, expected: u128, got: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("not a Clifford unitary: {0}")]
    NotClifford(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("action is intransitive; {0}")]
    Intransitive(String),

    #[error("degenerate match: {0}")]
    Degeneracy(String),

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
