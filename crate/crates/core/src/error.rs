use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("exponent must be >= 1 or infinity, got {0}")]
    ExponentOutOfRange(String),
    #[error("negative base {0} raised to a non-integer power")]
    NegativeBase(String),
    #[error("certified error {achieved} exceeds the requested bound 2^-{bits}")]
    PrecisionExhausted { achieved: String, bits: u32 },
    #[error("window must be nonempty")]
    EmptyWindow,
    #[error("lambda is not strictly increasing at index {0}")]
    NotStrictlyIncreasing(usize),
    #[error("lambda_0 must be positive")]
    NonPositiveStart,
    #[error("unknown witness {0:?}")]
    UnknownWitness(String),
    #[error("witness {0:?} requires an exponent p")]
    MissingP(String),
    #[error("witness {0:?} is irrational; use the real-valued generator")]
    RealOnlyWitness(String),
    #[error("window length mismatch: expected {expected}, got {got}")]
    WindowMismatch { expected: usize, got: usize },
    #[error("zero diagonal entry at row {0}")]
    SingularDiagonal(usize),
    #[error("(1/lambda_n) is not summable for {0}")]
    DivergentTail(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("unknown condition id {0:?}")]
    UnknownCondition(String),
    #[error("series sum_j f_(j+1)^2 a_nj for row {0} cannot be certified convergent")]
    RowSeriesDivergent(usize),
    #[error("no characterization for the pair ({0}, {1})")]
    UnsupportedPair(String, String),
    #[error("unsupported target space {0}")]
    UnsupportedTarget(String),
    #[error("column limit of the transformed matrix is undetermined at column {0}")]
    AlphaLimitUndetermined(usize),
    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for malformed input (as opposed to a mathematically invalid request).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io { .. }
                | Error::UnknownWitness(_)
                | Error::UnknownCondition(_)
                | Error::MissingP(_)
        )
    }
}
