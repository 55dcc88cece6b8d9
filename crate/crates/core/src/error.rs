use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },

    #[error("depth {requested} exceeds the exhaustive depth cap {cap}")]
    DepthCapExceeded { requested: usize, cap: usize },

    #[error("{function}({arg}) is not tabulated")]
    NotTabulated { function: &'static str, arg: u64 },

    #[error("measure is not exact; {operation} needs exact cylinder masses")]
    NotExact { operation: &'static str },

    #[error("interval refinement for cylinder {sigma} exhausted at precision {precision}")]
    RefinementBudget { sigma: String, precision: u32 },

    #[error("weight sum {sum} would exceed budget {budget}")]
    BudgetExceeded { sum: String, budget: String },

    #[error("search for {what} exceeded cap {cap}")]
    CapExceeded { what: String, cap: u64 },

    #[error("malformed block structure at bit {position}: {reason}")]
    Malformed { position: usize, reason: String },

    #[error("table exhausted: found {found} of {wanted} ({detail})")]
    TableExhausted {
        found: usize,
        wanted: usize,
        detail: String,
    },

    #[error("dense set {index} is indeterminate within budget {budget}")]
    Indeterminate { index: usize, budget: usize },

    #[error("value {value} is too large for {what}")]
    Overflow { what: &'static str, value: String },
}

impl Error {
    pub(crate) fn validation(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            what,
            reason: reason.into(),
        }
    }

    /// Stable machine-readable code, used by the CLI's JSON error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::DepthCapExceeded { .. } => "depth_cap_exceeded",
            Error::NotTabulated { .. } => "not_tabulated",
            Error::NotExact { .. } => "not_exact",
            Error::RefinementBudget { .. } => "refinement_budget",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Malformed { .. } => "malformed",
            Error::TableExhausted { .. } => "table_exhausted",
            Error::Indeterminate { .. } => "indeterminate",
            Error::Overflow { .. } => "overflow",
        }
    }
}
