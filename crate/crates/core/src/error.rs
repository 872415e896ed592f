use thiserror::Error;

/// Errors raised by the exact-arithmetic and geometry routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division leaves a nonzero remainder")]
    NonExactDivision,
    #[error("subspace is not closed under multiplication by epsilon")]
    NotEpsilonClosed,
    #[error("steps do not form an increasing chain of subspaces")]
    NotNested,
    #[error("splitting type must have at least one summand")]
    EmptySplitting,
    #[error("splitting type {0:?} is not balanced")]
    NotBalanced(Vec<i64>),
    #[error("component {0} has an unbalanced splitting type")]
    ComponentNotBalanced(usize),
    #[error("filtration does not contain the directrix subspace")]
    FlagDoesNotContainDirectrix,
    #[error("filtrations are not transverse")]
    NotTransverse,
    #[error("subspaces meet properly; nothing to separate")]
    SubspacesMeetProperly,
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("points are not in linearly general position: {0}")]
    DegeneratePosition(String),
    #[error("random construction failed after {0} attempts")]
    GenericityExhausted(usize),
    #[error("quadric contains link {0}")]
    QuadricContainsLink(usize),
    #[error("quadric does not vanish on the link adjacent to link {0}")]
    QuadricMissesAdjacentLink(usize),
    #[error("link {0} is reducible; residual divisors need a smooth link")]
    ReducibleLink(usize),
    #[error("{0}")]
    OutOfRange(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unexpected dimension for {what}: expected {expected}, found {found}")]
    UnexpectedDimension {
        what: String,
        expected: usize,
        found: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
