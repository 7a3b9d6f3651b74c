use thiserror::Error;

/// Errors raised by the toolkit. Variant names double as the error names
/// reported by the command-line front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LcError {
    #[error("UnsupportedVariant: {0}")]
    UnsupportedVariant(String),
    #[error("DimensionTooLarge: {what} supports n <= {max}, got n = {n}")]
    DimensionTooLarge { what: &'static str, max: usize, n: usize },
    #[error("DimensionMismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("OutsideSupport: point lies outside the support of the density")]
    OutsideSupport,
    #[error("SingularEstimate: sample covariance is not positive definite")]
    SingularEstimate,
    #[error("NotCentered: {0}")]
    NotCentered(String),
    #[error("LineSearchNoConverge: {0}")]
    LineSearchNoConverge(String),
    #[error("RejectionStall: acceptance rate {rate:.3e} below 1e-3")]
    RejectionStall { rate: f64 },
    #[error("NonFiniteObservable: observable returned {value} at {point:?}")]
    NonFiniteObservable { value: f64, point: Vec<f64> },
    #[error("ImproperInput: potential is +inf everywhere on the grid")]
    ImproperInput,
    #[error("GridMismatch: {0}")]
    GridMismatch(String),
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("ProxNoConverge: {0}")]
    ProxNoConverge(String),
    #[error("QuadratureNoConverge: {0}")]
    QuadratureNoConverge(String),
    #[error("MassTooSmall: mass {mass:.3e} is below 10 standard errors ({se:.3e})")]
    MassTooSmall { mass: f64, se: f64 },
}

pub type Result<T> = std::result::Result<T, LcError>;

impl LcError {
    /// Short variant name, used in CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            LcError::UnsupportedVariant(_) => "UnsupportedVariant",
            LcError::DimensionTooLarge { .. } => "DimensionTooLarge",
            LcError::DimensionMismatch { .. } => "DimensionMismatch",
            LcError::InvalidParameter(_) => "InvalidParameter",
            LcError::OutsideSupport => "OutsideSupport",
            LcError::SingularEstimate => "SingularEstimate",
            LcError::NotCentered(_) => "NotCentered",
            LcError::LineSearchNoConverge(_) => "LineSearchNoConverge",
            LcError::RejectionStall { .. } => "RejectionStall",
            LcError::NonFiniteObservable { .. } => "NonFiniteObservable",
            LcError::ImproperInput => "ImproperInput",
            LcError::GridMismatch(_) => "GridMismatch",
            LcError::NoConvergence(_) => "NoConvergence",
            LcError::ProxNoConverge(_) => "ProxNoConverge",
            LcError::QuadratureNoConverge(_) => "QuadratureNoConverge",
            LcError::MassTooSmall { .. } => "MassTooSmall",
        }
    }
}
