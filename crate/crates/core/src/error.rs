use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("requested limit {requested} exceeds the configured budget {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },

    #[error("argument {value} outside the supported range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("pole of the function at {0}")]
    Pole(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("zero table covers [{have_lo}, {have_hi}] but [{need_lo}, {need_hi}] is required")]
    Coverage {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },

    #[error("arithmetic table holds n <= {have} but n <= {need} is required")]
    TableTooShort { need: u64, have: u64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("empty zero table")]
    EmptyTable,

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
