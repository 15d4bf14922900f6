use std::path::PathBuf;

/// Errors produced by the symmetry-inference pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point cloud must contain at least one point")]
    EmptyCloud,

    #[error("non-finite coordinate at point {index}")]
    NonFiniteCoordinate { index: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("group elements of different orders: D_{left} vs D_{right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("invalid group element: index {k} not below order {n}")]
    InvalidElement { k: usize, n: usize },

    #[error("invalid group order {0}: must be at least 1")]
    InvalidOrder(usize),

    #[error("D_{small} is not a proper subgroup of D_{large}")]
    NotASubgroup { small: usize, large: usize },

    #[error("brute-force transport limited to {limit} points, got {size}")]
    SizeLimit { size: usize, limit: usize },

    #[error("non-finite transport cost between source {row} and target {col}")]
    CostOverflow { row: usize, col: usize },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("candidate n = {n} outside lattice [{n_min}, {n_max}]")]
    OutOfLattice { n: usize, n_min: usize, n_max: usize },

    #[error("lattice of {size} candidates exceeds the enumeration limit of {limit}")]
    LatticeTooLarge { size: usize, limit: usize },

    #[error("cannot summarize an empty trace")]
    EmptyTrace,

    #[error("trajectory diverged at iterate {iterate} (|z| = {modulus:e})")]
    Divergence { iterate: usize, modulus: f64 },

    #[error("time series needs at least {min} samples, got {len}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("degenerate phase at sample {index}: analytic signal vanishes")]
    DegeneratePhase { index: usize },

    #[error("series length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
