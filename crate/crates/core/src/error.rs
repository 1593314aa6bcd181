use thiserror::Error;

/// Errors produced while constructing or manipulating the laboratory objects.
///
/// Verification *failures* are not errors: they are reported as failing
/// checks inside a [`crate::report::VerificationReport`]. Errors mean the
/// input data is malformed enough that a computation cannot proceed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a block algebra needs at least one block, all of positive dimension")]
    EmptyAlgebra,

    #[error("elements belong to different block algebras ({left:?} vs {right:?})")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("operation requires a tensor product algebra")]
    NotTensor,

    #[error("block {block} has shape {found:?}, expected {expected:?}")]
    BlockShape {
        block: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix has shape {found:?}, expected {expected:?}")]
    MatrixShape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("density element is not Hermitian (residual {0:.3e})")]
    NonHermitianDensity(f64),

    #[error("density element is not positive definite (min eigenvalue {0:.3e})")]
    NonPositiveDensity(f64),

    #[error("linear map violates declared flag `{flag}` (residual {residual:.3e})")]
    FlagViolation { flag: &'static str, residual: f64 },

    #[error("linear map is not invertible")]
    NotInvertible,

    #[error("subalgebra embedding is invalid: {0}")]
    BadEmbedding(String),

    #[error("separability triple rejected: check `{check}` failed (residual {residual:.3e})")]
    TripleRejected { check: String, residual: f64 },

    #[error("multiplier extension is ill-defined: {0}")]
    IllDefinedExtension(String),

    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),

    #[error("groupoid file is malformed: {0}")]
    GroupoidFormat(String),

    #[error("unsupported isotropy group: {0}")]
    UnsupportedIsotropy(String),

    #[error("the function-algebra model requires the counting weight on the unit space: {0}")]
    NonCountingBaseWeight(String),

    #[error("malformed input: {0}")]
    Format(String),
}
