use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("at least one satellite spin is required")]
    NoSatellites,
    #[error("satellite field array has {got} entries but the state has {expected} satellites")]
    FieldLength { expected: usize, got: usize },
    #[error("the symmetric backend requires a uniform satellite field")]
    NonUniformFields,
    #[error("state dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dense oracle limited to {max} satellites (got {got})")]
    SizeGuard { max: usize, got: usize },
    #[error("full backend limited to {max} satellites (got {got})")]
    FullBackendTooLarge { max: usize, got: usize },
    #[error("state has no weight in the permutation-symmetric sector")]
    NoSymmetricWeight,
    #[error("series is empty")]
    EmptySeries,
    #[error("trajectory has {got} records, {needed} required")]
    TooShort { needed: usize, got: usize },
    #[error("finite-difference step must be positive (got {0})")]
    InvalidStep(f64),
    #[error("scaling fit requires positive values (got {0})")]
    NonPositive(f64),
    #[error("scaling fit requires at least {needed} points (got {got})")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("no tabulated prediction at t = {0}")]
    UntabulatedTime(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SpinError>;
