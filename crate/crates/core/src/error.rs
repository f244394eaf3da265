use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("jet rings differ: {0}")]
    JetMismatch(String),
    #[error("negative degree {0}")]
    NegativeDegree(i64),
    #[error("the divisor ideal is zero")]
    ZeroIdeal,
    #[error("too many variables: {0} (at most 16 supported)")]
    TooManyVariables(usize),
    #[error("exponent overflow in monomial arithmetic")]
    ExponentOverflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported genus {0}")]
    UnsupportedGenus(u32),
    #[error("unknown intersection symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("{context}: expected dimension {expected}, computed {computed}")]
    UnexpectedDimension {
        context: String,
        expected: usize,
        computed: usize,
    },
    #[error("interpolation did not stabilize: {0}")]
    NotStabilized(String),
    #[error("free resolution longer than the cap of {0}")]
    ResolutionTooLong(usize),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("inconsistent invariants: {0}")]
    Inconsistent(String),
    #[error("missing invariant: {0}")]
    MissingInvariant(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration limit reached: {0}")]
    IterationLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
