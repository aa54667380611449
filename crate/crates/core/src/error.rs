use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures of the numerical layers (algebra, trap model, dynamics, protocols).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock dimension {dim} is invalid: need at least 2 levels")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator tagged {tag} violates its invariant (residual {residual:.3e})")]
    TagViolation { tag: &'static str, residual: f64 },

    #[error("occupation {occupation} does not fit below the guard band of a {dim}-level mode")]
    OccupationExceedsTruncation { occupation: usize, dim: usize },

    #[error("truncation leak: guard-band population {population:.3e} exceeds {threshold:.1e}")]
    TruncationLeak { population: f64, threshold: f64 },

    #[error("imaginary residue {residue:.3e} in a quantity that must be real")]
    ImaginaryResidue { residue: f64 },

    #[error("invalid trap configuration: {0}")]
    InvalidTrap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step policy violated: {0}")]
    StepPolicy(String),

    #[error("numerical contract violated: {0}")]
    Contract(String),
}
