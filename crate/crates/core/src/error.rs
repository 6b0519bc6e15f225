use thiserror::Error;

/// Errors raised by the detector library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A tunable or system parameter is outside its valid range.
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Exhaustive ML search was requested for an instance above the enumeration budget.
    #[error("oracle too large: {bits} bits exceeds the {budget}-bit enumeration budget")]
    OracleTooLarge { bits: u32, budget: u32 },
    /// A linear system could not be solved.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The sampling temperature collapsed because the noise variance is zero.
    #[error("degenerate temperature: noise variance must be positive")]
    DegenerateTemperature,
}

pub type Result<T> = std::result::Result<T, Error>;
