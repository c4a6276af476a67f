//! Ball measures, target schedules realizing prescribed measure sequences, and
//! the theory-side growth-exponent predictions.

mod ball;
mod prediction;
mod schedule;

pub use ball::{
    arcsine_cdf, BallMeasureModel, EmpiricalCdf, LsvCalibration, MeasureRegime, CALIBRATION_BINS,
    CALIBRATION_SAMPLES,
};
pub use prediction::{predicted_exponent, Prediction, RegimeLabel};
pub use schedule::{ScheduleKind, Target, TargetSchedule};

pub(crate) use ball::least_squares_slope;
