use thiserror::Error;

/// Every failure mode of the crate. Domain errors carry enough context to
/// name the offending input.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, more than 1e-12 away from 1")]
    NotNormalized { sum: f64 },
    #[error("duplicate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("label mismatch: {context}")]
    LabelMismatch { context: String },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("alpha={alpha} is within the degenerate window around 1; use Alpha::One")]
    DegenerateAlpha { alpha: f64 },
    #[error("joint distribution is not absolutely continuous w.r.t. the reference measure")]
    AbsoluteContinuityViolated,
    #[error("custom generator must be convex with f(1)=0")]
    NotConvexAtOne,
    #[error("no outcome with positive mass in the support")]
    NoSupport,
    #[error("empty support set")]
    EmptySupport,
    #[error("convex conjugate diverges at x={x}")]
    DivergentConjugate { x: f64 },
    #[error("no finite Orlicz norm within the overflow guard")]
    NoFiniteNorm,
    #[error("generator is not non-decreasing where its inverse is evaluated")]
    NonMonotoneGenerator,
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("negative leakage step {0}")]
    NegativeLeakage(f64),
    #[error("{atoms} atoms exceed the enumeration cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("not an Orlicz function: {0}")]
    InvalidOrlicz(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::DuplicateLabel { .. } => "DuplicateLabel",
            Error::LabelMismatch { .. } => "LabelMismatch",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::DegenerateAlpha { .. } => "DegenerateAlpha",
            Error::AbsoluteContinuityViolated => "AbsoluteContinuityViolated",
            Error::NotConvexAtOne => "NotConvexAtOne",
            Error::NoSupport => "NoSupport",
            Error::EmptySupport => "EmptySupport",
            Error::DivergentConjugate { .. } => "DivergentConjugate",
            Error::NoFiniteNorm => "NoFiniteNorm",
            Error::NonMonotoneGenerator => "NonMonotoneGenerator",
            Error::AssumptionViolated(_) => "AssumptionViolated",
            Error::NegativeLeakage(_) => "NegativeLeakage",
            Error::TooManyAtoms { .. } => "TooManyAtoms",
            Error::InvalidOrlicz(_) => "InvalidOrlicz",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
