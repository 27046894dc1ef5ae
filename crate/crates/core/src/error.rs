use thiserror::Error;

/// Errors raised while building jets, evaluating models or running the
/// hyperbolicity machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric not Lorentzian: found {negative} negative and {zero} vanishing eigenvalues")]
    NotLorentzian { negative: usize, zero: usize },
    #[error("target metric not positive definite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("scalar s must be nonnegative, got {0}")]
    NegativeScalar(f64),
    #[error("outside model domain: {0}")]
    Domain(String),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("adapted frame is defective (residual {residual:e})")]
    DefectiveFrame { residual: f64 },
    #[error("matrix is not symmetric to tolerance (asymmetry {asymmetry:e})")]
    AsymmetricInput { asymmetry: f64 },
    #[error("direction is degenerate: det m(eta, eta) = {det:e}")]
    DegenerateDirection { det: f64 },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error(
        "rank constraint violated: {nonzero} nonzero lambdas exceed target dimension {target_dim}"
    )]
    RankConstraintViolation { nonzero: usize, target_dim: usize },
    #[error("epsilon {epsilon} too large: observer margin {margin:e} is not positive")]
    EpsilonTooLarge { epsilon: f64, margin: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable kebab-case identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::NotLorentzian { .. } => "not-lorentzian",
            Self::NotPositiveDefinite { .. } => "not-positive-definite",
            Self::NotSymmetric { .. } => "not-symmetric",
            Self::DimensionMismatch(_) => "dimension-mismatch",
            Self::NegativeScalar(_) => "negative-scalar",
            Self::Domain(_) => "domain",
            Self::ZeroVector => "zero-vector",
            Self::DefectiveFrame { .. } => "defective-frame",
            Self::AsymmetricInput { .. } => "asymmetric-input",
            Self::DegenerateDirection { .. } => "degenerate-direction",
            Self::ZeroPolynomial => "zero-polynomial",
            Self::RankConstraintViolation { .. } => "rank-constraint-violation",
            Self::EpsilonTooLarge { .. } => "epsilon-too-large",
            Self::InvalidArgument(_) => "invalid-argument",
        }
    }
}
