use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),

    #[error("digit {digit} at position {position} is not in [0, {prime})")]
    InvalidDigit {
        digit: u32,
        position: usize,
        prime: u32,
    },

    #[error("value is not divisible by p^{exponent}")]
    InexactDivision { exponent: usize },

    #[error("precision exhausted: need {needed} digits, have {available}")]
    PrecisionExhausted { needed: usize, available: usize },

    #[error("m* is undefined for m = {0} (requires m >= p)")]
    UndefinedMStar(String),

    #[error("floor(log_p m) is undefined for m = 0")]
    LogOfZero,

    #[error("index {index} out of range for precision {precision}")]
    IndexOutOfRange { index: usize, precision: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("coordinate {coordinate} out of range for arity {arity}")]
    CoordinateOutOfRange { coordinate: usize, arity: usize },

    #[error("constant {0} is not p-integral")]
    NonIntegralConstant(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coefficient bound violated at index {index}")]
    BoundViolated { index: String },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("root replay failed: {0}")]
    ReplayFailed(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
