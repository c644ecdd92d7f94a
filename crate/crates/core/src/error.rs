use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QpdError {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("resource exceeded: {what} (at step {step})")]
    ResourceExceeded { what: String, step: usize },

    #[error("not a chain map: square at index {index}, internal degree {degree} fails to commute")]
    NotChainMap { index: i64, degree: i64 },

    #[error("not a complex: d∘d ≠ 0 at index {index}")]
    NotComplex { index: i64 },

    #[error("zero ring: the ideal contains a unit")]
    ZeroRing,

    #[error("rejected: {0}")]
    Rejected(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, QpdError>;

impl QpdError {
    pub fn arg(msg: impl Into<String>) -> Self {
        QpdError::Argument(msg.into())
    }

    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        QpdError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub fn budget(what: impl Into<String>, step: usize) -> Self {
        QpdError::ResourceExceeded {
            what: what.into(),
            step,
        }
    }

    /// True for failures caused by exhausted budgets or windows rather than
    /// malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(self, QpdError::ResourceExceeded { .. })
    }
}
