use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Anchor, OrbitState, SystemDescriptor};
use crate::error::AccumulateError;
use crate::measure::{predicted_exponent, ScheduleKind, TargetSchedule};
use crate::observables::{ObservableKind, ObservableSpec};

use super::estimate::{estimate_exponent, ExponentEstimate};
use super::sum::CompensatedSum;
use super::top::{TopTerms, B_MAX};

/// Default checkpoint spacing, eight per decade.
pub fn default_checkpoint_ratio() -> f64 {
    10f64.powf(0.125)
}

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 0.1;
/// Runs abort once `S_n` exceeds this bound.
pub const OVERFLOW_LIMIT: f64 = 1e300;
pub const MIN_ORBIT_LENGTH: u64 = 1_000;

/// Snapshot of every running statistic at orbit time `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub n: u64,
    /// Birkhoff sum `Σ_{j=1}^n φ(T^j x)`, compensated.
    pub s_n: f64,
    /// Running maximum of `φ` along the orbit.
    pub m_n: f64,
    /// `Σ_{j≤n} 1_{B_j}(T^j x)`.
    pub hits: u64,
    /// `Σ_{j≤n} μ(B_j)`.
    pub e_n: f64,
    /// Last `j ≤ n` with `T^j x ∈ B_j`, or 0 if there was none.
    pub last_hit_index: u64,
    /// The largest observable values seen so far, largest first.
    pub top_terms: Vec<f64>,
    /// `a(S_n)/n` with `a(x) = x^{D_eff/k} / (log x)^{1+η}`.
    pub aaronson_ratio: f64,
}

impl CheckpointRecord {
    pub fn sbc_ratio(&self) -> f64 {
        self.hits as f64 / self.e_n
    }

    pub fn qsbc_residual(&self, delta: f64) -> f64 {
        (self.hits as f64 - self.e_n) / self.e_n.powf(0.5 + delta)
    }

    pub fn log_ratio(&self) -> f64 {
        self.s_n.ln() / (self.n as f64).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub n_max: u64,
    pub seed: u64,
    pub checkpoint_ratio: f64,
    /// Exponent slack in the QSBC residual `(hits − E_n) / E_n^{1/2+δ}`.
    pub delta: f64,
    /// Log power in the Aaronson rate function.
    pub eta: f64,
}

impl RunParams {
    pub fn new(n_max: u64, seed: u64) -> Self {
        RunParams {
            n_max,
            seed,
            checkpoint_ratio: default_checkpoint_ratio(),
            delta: DEFAULT_DELTA,
            eta: DEFAULT_ETA,
        }
    }

    fn validate(&self) -> Result<(), AccumulateError> {
        let bad = |m: String| Err(AccumulateError::InvalidParameter(m));
        if self.n_max < MIN_ORBIT_LENGTH {
            return bad(format!(
                "n_max must be at least {MIN_ORBIT_LENGTH}, got {}",
                self.n_max
            ));
        }
        if !(self.checkpoint_ratio > 1.0 && self.checkpoint_ratio.is_finite()) {
            return bad(format!(
                "checkpoint_ratio must exceed 1, got {}",
                self.checkpoint_ratio
            ));
        }
        if !(self.delta > 0.0) || !(self.eta > 0.0) {
            return bad(format!(
                "δ and η must be positive, got δ = {}, η = {}",
                self.delta, self.eta
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    Completed,
    /// `S_n` exceeded [`OVERFLOW_LIMIT`] at step `at_n`; checkpoints stop there.
    Overflow {
        at_n: u64,
    },
}

/// Everything one orbit produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub system: SystemDescriptor,
    pub observable: ObservableSpec,
    pub schedule: ScheduleKind,
    pub params: RunParams,
    pub status: RunStatus,
    pub checkpoints: Vec<CheckpointRecord>,
    /// Trailing-decade slope of `log S_n` against `log n`.
    pub exponent_estimate: Option<f64>,
    /// `log S_n / log n` at the final checkpoint.
    pub exponent_pointwise: f64,
    pub sbc_ratio_series: Vec<f64>,
    pub qsbc_residual_series: Vec<f64>,
}

/// Checkpoint times: `round(ratio^i)` (bumped to stay strictly increasing)
/// while below `n_max`, then `n_max` itself.
pub fn checkpoint_times(n_max: u64, ratio: f64) -> Vec<u64> {
    let mut times = Vec::new();
    let mut prev = 0u64;
    let log_ratio = ratio.ln();
    for i in 1u32.. {
        let t = ((f64::from(i) * log_ratio).exp().round() as u64).max(prev + 1);
        if t >= n_max {
            break;
        }
        times.push(t);
        prev = t;
    }
    times.push(n_max);
    times
}

/// The PRNG from which an orbit's initial state is drawn.
pub fn orbit_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs one orbit from a state drawn from the invariant measure.
pub fn run_orbit(
    system: &SystemDescriptor,
    observable: &ObservableSpec,
    schedule: &TargetSchedule,
    params: &RunParams,
) -> Result<RunResult, AccumulateError> {
    let state = OrbitState::sample_invariant(system, orbit_rng(params.seed));
    run_orbit_from(system, observable, schedule, params, state)
}

/// Runs one orbit from an explicit initial state `x`; accumulation starts at `T x`.
pub fn run_orbit_from(
    system: &SystemDescriptor,
    observable: &ObservableSpec,
    schedule: &TargetSchedule,
    params: &RunParams,
    mut state: OrbitState,
) -> Result<RunResult, AccumulateError> {
    params.validate()?;
    observable.validate(system)?;
    if schedule.p.dimension() != system.dimension {
        return Err(AccumulateError::InvalidParameter(
            "schedule point does not match the system dimension".into(),
        ));
    }
    let times = checkpoint_times(params.n_max, params.checkpoint_ratio);

    let aaronson_exponent = match observable.kind {
        ObservableKind::PowerDistance => {
            let pred = predicted_exponent(system, &observable.p, observable.k)?;
            Some(pred.effective_dimension / observable.k)
        }
        ObservableKind::LogDistance => None,
    };
    let aaronson = |s: f64, n: u64| match aaronson_exponent {
        Some(e) if s > 1.0 => s.powf(e) / s.ln().powf(1.0 + params.eta) / n as f64,
        _ => f64::NAN,
    };

    let obs_anchor = Anchor::new(&observable.p);
    let target_anchor = Anchor::new(&schedule.p);
    let same_anchor = observable.p == schedule.p;

    let mut s_n = CompensatedSum::new();
    let mut e_n = CompensatedSum::new();
    let mut m_n = 0.0f64;
    let mut hits = 0u64;
    let mut last_hit = 0u64;
    let mut top = TopTerms::new(B_MAX);
    let mut checkpoints = Vec::with_capacity(times.len());
    let mut status = RunStatus::Completed;

    let mut next = 0usize;
    for j in 1..=params.n_max {
        state.step(system);
        let d = obs_anchor.distance(&state);
        let value = observable.at_distance(d);
        s_n.add(value);
        if value > m_n {
            m_n = value;
        }
        top.push(value);

        let target = schedule.target(j);
        e_n.add(target.measure);
        let d_target = if same_anchor {
            d
        } else {
            target_anchor.distance(&state)
        };
        if d_target < target.radius {
            hits += 1;
            last_hit = j;
        }

        let s = s_n.value();
        let overflow = !(s <= OVERFLOW_LIMIT);
        if j == times[next] || overflow {
            checkpoints.push(CheckpointRecord {
                n: j,
                s_n: s,
                m_n,
                hits,
                e_n: e_n.value(),
                last_hit_index: last_hit,
                top_terms: top.sorted_desc(),
                aaronson_ratio: aaronson(s, j),
            });
            next += 1;
            if overflow {
                status = RunStatus::Overflow { at_n: j };
                break;
            }
        }
    }

    let estimate = estimate_exponent(&checkpoints).ok();
    let last = checkpoints.last().expect("at least one checkpoint");
    let exponent_pointwise = last.log_ratio();
    let sbc_ratio_series = checkpoints.iter().map(|c| c.sbc_ratio()).collect();
    let qsbc_residual_series = checkpoints
        .iter()
        .map(|c| c.qsbc_residual(params.delta))
        .collect();

    Ok(RunResult {
        seed: params.seed,
        system: *system,
        observable: *observable,
        schedule: schedule.kind,
        params: *params,
        status,
        exponent_estimate: estimate.map(|ExponentEstimate { slope, .. }| slope),
        exponent_pointwise,
        checkpoints,
        sbc_ratio_series,
        qsbc_residual_series,
    })
}
