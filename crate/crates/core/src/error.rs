use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The requested materialization exceeds the configured chain budget.
    #[error("chain budget exceeded: {chains} chains requested, budget is {budget}")]
    Budget { chains: u128, budget: u64 },

    #[error("refusing to enumerate 2^{record_length} strings (limit is 2^{limit})")]
    Guardrail { record_length: usize, limit: usize },

    #[error("unknown identity claim {0}")]
    UnknownClaim(u64),

    #[error("configuration mismatch: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::Parameter(message.into())
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
