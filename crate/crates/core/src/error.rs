use thiserror::Error;

use crate::regex::McViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("symbol `{0}` is not in the automaton alphabet")]
    Vocabulary(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("invalid weight literal `{0}`")]
    Literal(String),

    #[error("not an mc-regular expression: {}", format_violations(.0))]
    Validity(Vec<McViolation>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("infinite loss: data item {index} ({multiset}) has nonpositive weight")]
    InfiniteLoss { index: usize, multiset: String },

    #[error("not a distribution: {0}")]
    NotDistribution(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[McViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Resource,
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Shape(_)
            | Error::Vocabulary(_)
            | Error::Syntax { .. }
            | Error::Literal(_)
            | Error::Validity(_)
            | Error::Invalid(_)
            | Error::Unsupported(_)
            | Error::Json(_) => ErrorClass::Validation,
            Error::Resource(_) => ErrorClass::Resource,
            Error::Degenerate(_)
            | Error::InfiniteLoss { .. }
            | Error::NotDistribution(_)
            | Error::Internal(_) => ErrorClass::Numeric,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}
