use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state {value} lies outside the unit interval")]
    OutOfDomain { value: f64 },
    #[error("invalid system parameter: {0}")]
    InvalidParameter(String),
    #[error("point {0} is not in the phase space of this system")]
    PointOutsidePhaseSpace(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("ball measure model is missing data required by its regime: {0}")]
    MissingModelData(&'static str),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("target measure {target} must lie in (0, {max}]")]
    TargetOutOfRange { target: f64, max: f64 },
    #[error("invalid schedule parameter: {0}")]
    InvalidSchedule(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AccumulateError {
    #[error("insufficient data: need at least {needed} checkpoints, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("trim size {b} exceeds the retained top-term count {b_max}")]
    TrimTooLarge { b: usize, b_max: usize },
    #[error("invalid run parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
