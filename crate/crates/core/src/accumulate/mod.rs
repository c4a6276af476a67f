//! Orbit-level accumulation: Birkhoff sums, maxima, shrinking-target hit
//! counts, and the estimators built on their checkpoints.

mod escape;
mod estimate;
mod orbit;
mod sum;
mod top;

pub use escape::{escape_time, DEFAULT_EPSILON0};
pub use estimate::{
    envelope_occupation, estimate_exponent, estimate_exponent_series, mn_fluctuation, trimmed_sum,
    ExponentEstimate, FLUCTUATION_START, MIN_FLUCTUATION_CHECKPOINTS, MIN_WINDOW_POINTS,
};
pub use orbit::{
    checkpoint_times, default_checkpoint_ratio, orbit_rng, run_orbit, run_orbit_from,
    CheckpointRecord, RunParams, RunResult, RunStatus, DEFAULT_DELTA, DEFAULT_ETA,
    MIN_ORBIT_LENGTH, OVERFLOW_LIMIT,
};
pub use sum::CompensatedSum;
pub use top::{TopTerms, B_MAX};
