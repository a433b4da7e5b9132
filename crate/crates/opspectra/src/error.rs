//! Error taxonomy shared by the library, the CLI and the C ABI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received parameters outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Inputs have incompatible or non-square shapes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An input value violates an operation precondition (wrong spectrum
    /// kind, negative weights, empty sample, degenerate matrix).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical contract failed at run time (solver non-convergence,
    /// unitarity drift, imaginary residue above tolerance).
    #[error("numerical contract violated: {0}")]
    Numerical(String),

    /// A structural identity that must hold exactly failed beyond tolerance.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    /// Quadrature or series evaluation could not reach the target accuracy.
    #[error("accuracy not reached: {0}")]
    Accuracy(String),

    /// An iterative fit found no bracket or failed to converge.
    #[error("fit did not converge: {0}")]
    NonConvergence(String),

    /// Integer arithmetic left the representable range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Invalid experiment configuration (unknown keys, missing values).
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI process exit code: 2 for configuration problems, 3 for numerical
    /// contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::ShapeMismatch(_)
            | Error::InvalidInput(_)
            | Error::Config(_)
            | Error::Overflow(_)
            | Error::Io(_) => 2,
            Error::Numerical(_)
            | Error::StructureViolation(_)
            | Error::Accuracy(_)
            | Error::NonConvergence(_) => 3,
        }
    }
}
