use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Numerical failures (non-convergence, tolerance breakdowns) are kept apart
/// from input errors so that front ends can map them to different exit codes
/// via [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    SingularMatrix { pivot: f64, column: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },

    #[error("matrix not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("form is not positive semidefinite (failed at pivot {pivot:e})")]
    NotPsd { pivot: f64 },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("cone generators must be nonzero (generator {index})")]
    ZeroGenerator { index: usize },

    #[error("cone contains a line: the negation of generator {index} lies in the cone")]
    DegenerateCone { index: usize },

    #[error("point lies in the cone; no separating functional exists")]
    PointInCone,

    #[error("generator {index} is mapped to (numerically) zero")]
    KernelMeetsCone { index: usize },

    #[error("subspace or cone is not invariant (defect {defect:e})")]
    NotInvariant { defect: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("iterate {iteration} left the cone")]
    LeftCone { iteration: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("shifted operator id + u is singular")]
    SingularShift,

    #[error("vector is not in the cone")]
    NotInCone,

    #[error("u(y) is not parallel to y (sine of angle {sine:e})")]
    NotParallel { sine: f64 },

    #[error("operator is not selfadjoint for the metric (defect {defect:e})")]
    NotSelfadjoint { defect: f64 },

    #[error("eigenvalue certificate failed: smallest singular value {sigma:e} above threshold {threshold:e}")]
    CertificateFailed { sigma: f64, threshold: f64 },

    #[error("ill-conditioned gcd: remainder norm {ratio:e} straddles the threshold (candidate degrees {degree_if_zero} or {degree_if_nonzero})")]
    GcdIllConditioned {
        ratio: f64,
        degree_if_zero: usize,
        degree_if_nonzero: usize,
    },

    #[error("candidate factor does not divide the polynomial (remainder {remainder:e})")]
    NotADivisor { remainder: f64 },

    #[error("eigenspace of u + u^-1 is the whole space at degree {degree}; tolerance budget exceeded")]
    InconsistentDimension { degree: usize },

    #[error("refinement diverged (remainder {remainder:e})")]
    Diverged { remainder: f64 },

    #[error("bracket width reached machine resolution near {at}")]
    IntervalTooSmall { at: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Context { source, .. } => source.is_numerical(),
            Error::NonConvergence { .. }
            | Error::LeftCone { .. }
            | Error::CertificateFailed { .. }
            | Error::GcdIllConditioned { .. }
            | Error::NotADivisor { .. }
            | Error::InconsistentDimension { .. }
            | Error::Diverged { .. }
            | Error::IntervalTooSmall { .. }
            | Error::Numerical(_) => true,
            _ => false,
        }
    }

    /// The innermost error, with context annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
