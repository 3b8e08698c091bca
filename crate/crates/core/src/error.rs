use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// A certified comparison stayed undecided up to the precision cap.
    #[error("precision exhausted at {bits} bits while deciding {what}")]
    PrecisionExhausted { bits: u32, what: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An enumeration would need denominators beyond the configured budget.
    #[error("enumeration budget exceeded: q up to {requested} requested, budget is {budget}")]
    BudgetExceeded { requested: String, budget: u64 },

    #[error("illegal {player} move at round {round}: {reason}")]
    IllegalMove {
        round: usize,
        player: String,
        reason: String,
    },

    #[error("strategy invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
