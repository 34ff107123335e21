use thiserror::Error;

/// Errors raised by joinlab operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem out of range: index {index} for a {count}-party space")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("permutation requires homogeneous space")]
    NonHomogeneousSpace,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("Hermitian required (max |M - M^dag| = {defect:e})")]
    HermitianRequired { defect: f64 },

    #[error("unsupported dimension d = {d}: {context}")]
    UnsupportedDimension { d: usize, context: &'static str },

    #[error("bipartite only: the channel cone is defined for n = 2, got n = {0}")]
    BipartiteOnly(usize),

    #[error("dimension cap exceeded: {d}^{n} > {cap}")]
    DimensionCap { d: usize, n: usize, cap: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("monotonicity violated at ({ab}, {ac}, {bc}): {rule}")]
    Monotonicity {
        ab: f64,
        ac: f64,
        bc: f64,
        rule: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
