use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sequence is not strongly invertible: determinant {0}")]
    NotStronglyInvertible(String),

    #[error("support of length {len} is too short for a jet of order {order}")]
    SupportTooShort { len: usize, order: usize },

    #[error("matching filter value at 0 is zero")]
    ZeroMatchingValue,

    #[error("1 is not a simple eigenvalue of the mask symbol at 0")]
    NoSimpleEigenvalueOne,

    #[error("1 - 2^{0} a(0) is singular (resonant eigenvalue 2^-{0})")]
    SingularResonance(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("insufficient sum rules: have order {have}, need {need}")]
    InsufficientSumRules { have: usize, need: usize },

    #[error("polynomial division left a nonzero remainder: {0}")]
    DivisionNotExact(String),

    #[error("polynomial degree {0} exceeds the supported maximum")]
    DegreeTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage labels peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
