use thiserror::Error;

/// Errors raised by the engines and their inputs.
///
/// Variant names double as the machine-readable error names reported by the
/// CLI and the C interface.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("nonphysical weights: {0}")]
    NonphysicalWeights(String),
    #[error("problem too large: {what} = {got} exceeds cap {cap}")]
    TooLarge { what: &'static str, got: usize, cap: usize },
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("duplicate rapidity at positions {0} and {1}")]
    DuplicateRapidity(usize, usize),
    #[error("singular Hankel determinant of phi-derivatives (order {0})")]
    SingularHankel(usize),
    #[error("series is not invertible: zero constant term")]
    NotInvertible,
    #[error("polynomial division left a nonzero remainder")]
    NotDivisible,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rapidity inversion lands on a pole of phi (z = 0)")]
    BranchPole,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("independent evaluations disagree: {0}")]
    Inconsistent(String),
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

impl Error {
    /// Short stable name, e.g. `"DuplicateRapidity"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::NonphysicalWeights(_) => "NonphysicalWeights",
            Error::TooLarge { .. } => "TooLarge",
            Error::BadIndex(_) => "BadIndex",
            Error::DuplicateRapidity(..) => "DuplicateRapidity",
            Error::SingularHankel(_) => "SingularHankel",
            Error::NotInvertible => "NotInvertible",
            Error::NotDivisible => "NotDivisible",
            Error::Unsupported(_) => "Unsupported",
            Error::BranchPole => "BranchPole",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::Inconsistent(_) => "Inconsistent",
            Error::Parse { .. } => "Parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
