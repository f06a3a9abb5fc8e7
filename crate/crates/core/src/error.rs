use thiserror::Error;

/// Errors raised by the permutation, path, and partition APIs.
///
/// Unsortedness is not an error: see [`crate::stacksort::canonical_hooks`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entry {0} appears more than once")]
    DuplicateEntry(u32),

    #[error("entries must be positive integers")]
    ZeroEntry,

    #[error("{0} is not normalized (entries must be exactly 1..=n)")]
    NotNormalized(String),

    #[error("pattern must be nonempty")]
    EmptyPattern,

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("semilength mismatch: {0} vs {1}")]
    SemilengthMismatch(usize, usize),

    #[error("size mismatch: partitions of [{0}] and [{1}]")]
    SizeMismatch(usize, usize),

    #[error("not a set partition of [{k}]: {reason}")]
    NotAPartition { k: usize, reason: String },

    #[error("partition is not noncrossing")]
    Crossing,

    #[error("({lower}, {upper}) is not an interval of the {kind} order")]
    NotAnInterval {
        lower: String,
        upper: String,
        kind: &'static str,
    },

    #[error("{perm} is not in the required class: {reason}")]
    Precondition { perm: String, reason: String },

    #[error("resource guard exceeded: {what} = {value} > {limit} (raise the limit to override)")]
    ResourceLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("margin hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("broken hook chain: {0}")]
    BrokenChain(String),

    #[error("unknown {what}: {name:?}")]
    Unknown { what: &'static str, name: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
