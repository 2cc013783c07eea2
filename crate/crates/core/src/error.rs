use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}; only 2 and 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("singular Jacobian at {point:?} (|det J| = {det:e})")]
    SingularJacobian { point: Vec<f64>, det: f64 },

    #[error("point {0:?} lies outside the closed unit ball")]
    OutsideBall(Vec<f64>),

    #[error("the first basis member must be a nonzero constant")]
    NonConstantLeadingBasis,

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("inconsistent problem: {0}")]
    InconsistentProblem(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
