use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid p-value {0}: must lie in [0, 1]")]
    InvalidPValue(f64),

    #[error("invalid e-value {0}: must be a nonnegative number or +inf")]
    InvalidEValue(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("parameter `{name}` = {value} out of range: expected {expected}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("index `{name}` = {value} out of range 1..={max}")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("numerical method did not converge: {0}")]
    NonConvergence(String),

    #[error("dimension {k} exceeds the enumeration guard of {max}")]
    DimensionTooLarge { k: usize, max: usize },

    #[error("invalid joint distribution: {0}")]
    InvalidSpec(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("zero p-value at position {0} is not supported here")]
    ZeroPValue(usize),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("undefined value: {0}")]
    Undefined(&'static str),
}
