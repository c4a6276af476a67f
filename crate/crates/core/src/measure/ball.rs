use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DensityRegime, OrbitState, Point, SystemDescriptor, SystemId};
use crate::error::MeasureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureRegime {
    LebesgueLike,
    ArcsineBoundary,
    IntermittentOrigin,
    Empirical,
}

/// Arcsine distribution function `(2/π) arcsin(√x)`.
pub fn arcsine_cdf(x: f64) -> f64 {
    2.0 / PI * x.clamp(0.0, 1.0).sqrt().asin()
}

/// Piecewise-linear distribution function on a uniform grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    /// `cdf[i]` is the estimated mass of `[0, i / bins]`.
    cdf: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let mut cdf = Vec::with_capacity(counts.len() + 1);
        let mut running = 0u64;
        cdf.push(0.0);
        for &c in counts {
            running += c;
            cdf.push(running as f64 / total as f64);
        }
        EmpiricalCdf { cdf }
    }

    pub fn bins(&self) -> usize {
        self.cdf.len() - 1
    }

    fn bin_of(&self, x: f64) -> usize {
        ((x * self.bins() as f64) as usize).min(self.bins() - 1)
    }

    fn density(&self, bin: usize) -> f64 {
        (self.cdf[bin + 1] - self.cdf[bin]) * self.bins() as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let bin = self.bin_of(x);
        let left = bin as f64 / self.bins() as f64;
        self.cdf[bin] + self.density(bin) * (x - left)
    }

    /// Mass of `[p − lo_gap, p + hi_gap]`, integrating the piecewise-constant
    /// density bin by bin so that small intervals keep full relative precision.
    fn mass(&self, p: f64, lo_gap: f64, hi_gap: f64) -> f64 {
        let a = p - lo_gap;
        let b = p + hi_gap;
        let (ia, ib) = (self.bin_of(a), self.bin_of(b));
        if ia == ib {
            return self.density(ia) * (lo_gap + hi_gap);
        }
        let n = self.bins() as f64;
        let head = self.density(ia) * ((ia + 1) as f64 / n - a);
        let body = self.cdf[ib] - self.cdf[ia + 1];
        let tail = self.density(ib) * (b - ib as f64 / n);
        head + body + tail
    }
}

/// Ball measures `μ(B(p, r))` for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMeasureModel {
    pub regime: MeasureRegime,
    pub dimension: u8,
    /// Density singularity exponent (IntermittentOrigin).
    pub alpha: f64,
    /// Constant `c` in `μ([0, r)) ≈ c r^{1−α}` (IntermittentOrigin).
    pub origin_constant: Option<f64>,
    pub empirical_cdf: Option<Arc<EmpiricalCdf>>,
}

impl BallMeasureModel {
    pub fn lebesgue(dimension: u8) -> Self {
        BallMeasureModel {
            regime: MeasureRegime::LebesgueLike,
            dimension,
            alpha: 0.0,
            origin_constant: None,
            empirical_cdf: None,
        }
    }

    pub fn arcsine() -> Self {
        BallMeasureModel {
            regime: MeasureRegime::ArcsineBoundary,
            dimension: 1,
            alpha: 0.5,
            origin_constant: None,
            empirical_cdf: None,
        }
    }

    pub fn intermittent_origin(alpha: f64, constant: f64) -> Self {
        BallMeasureModel {
            regime: MeasureRegime::IntermittentOrigin,
            dimension: 1,
            alpha,
            origin_constant: Some(constant),
            empirical_cdf: None,
        }
    }

    pub fn empirical(cdf: Arc<EmpiricalCdf>) -> Self {
        BallMeasureModel {
            regime: MeasureRegime::Empirical,
            dimension: 1,
            alpha: 0.0,
            origin_constant: None,
            empirical_cdf: Some(cdf),
        }
    }

    /// The model appropriate for balls about `p` in `system`. LSV models come
    /// from a cached long-orbit calibration.
    pub fn for_system(system: &SystemDescriptor, p: &Point) -> Result<Self, MeasureError> {
        Ok(match system.density_regime {
            DensityRegime::LebesgueLike => Self::lebesgue(system.dimension),
            DensityRegime::ArcsineBoundary => Self::arcsine(),
            DensityRegime::IntermittentOrigin => {
                if system.alpha == 0.0 {
                    return Ok(Self::lebesgue(1));
                }
                let cal = LsvCalibration::cached(system.alpha);
                match p {
                    Point::Line(x) if *x == 0.0 => {
                        Self::intermittent_origin(system.alpha, cal.origin_constant)
                    }
                    _ => Self::empirical(cal.cdf.clone()),
                }
            }
        })
    }

    /// Largest radius needed to cover the whole space from `p`.
    pub fn max_radius(&self, p: &Point) -> f64 {
        match (self.regime, p) {
            (_, Point::Torus(..)) => FRAC_1_SQRT_2,
            (MeasureRegime::IntermittentOrigin, _) => 1.0,
            (_, Point::Line(x)) => x.max(1.0 - x),
        }
    }

    pub fn mu_ball(&self, p: &Point, r: f64) -> Result<f64, MeasureError> {
        if !(r > 0.0) {
            return Err(MeasureError::NonPositiveRadius(r));
        }
        let mu = match (self.regime, p) {
            (MeasureRegime::LebesgueLike, Point::Torus(..)) => torus_disc_area(r),
            (MeasureRegime::LebesgueLike, Point::Line(x)) => {
                let (lo, hi) = gaps(*x, r);
                lo + hi
            }
            (MeasureRegime::ArcsineBoundary, Point::Line(x)) => {
                let (lo, hi) = gaps(*x, r);
                arcsine_mass(*x, lo, hi)
            }
            (MeasureRegime::IntermittentOrigin, Point::Line(x)) => {
                if *x != 0.0 {
                    return Err(MeasureError::MissingModelData(
                        "intermittent-origin asymptotics apply only at p = 0",
                    ));
                }
                let c = self.origin_constant.ok_or(MeasureError::MissingModelData(
                    "origin calibration constant",
                ))?;
                c * r.min(1.0).powf(1.0 - self.alpha)
            }
            (MeasureRegime::Empirical, Point::Line(x)) => {
                let cdf = self
                    .empirical_cdf
                    .as_ref()
                    .ok_or(MeasureError::MissingModelData(
                        "empirical distribution function",
                    ))?;
                let (lo, hi) = gaps(*x, r);
                cdf.mass(*x, lo, hi)
            }
            _ => {
                return Err(MeasureError::MissingModelData(
                    "model regime does not support two-dimensional balls",
                ))
            }
        };
        Ok(mu.clamp(0.0, 1.0))
    }

    /// Radius whose ball has measure `target_mu`, by bisection on the monotone
    /// map `r ↦ μ(B(p, r))` (closed form for one-dimensional Lebesgue and
    /// intermittent-origin balls).
    pub fn radius_for_measure(&self, p: &Point, target_mu: f64) -> Result<f64, MeasureError> {
        let r_max = self.max_radius(p);
        let mu_max = self.mu_ball(p, r_max)?;
        if !(target_mu > 0.0 && target_mu <= mu_max) {
            return Err(MeasureError::TargetOutOfRange {
                target: target_mu,
                max: mu_max,
            });
        }
        match (self.regime, p) {
            (MeasureRegime::LebesgueLike, Point::Line(x)) => {
                let near = x.min(1.0 - x);
                return Ok(if target_mu <= 2.0 * near {
                    target_mu / 2.0
                } else {
                    target_mu - near
                });
            }
            (MeasureRegime::IntermittentOrigin, _) => {
                let c = self.origin_constant.unwrap_or(1.0);
                let r = (target_mu / c).powf(1.0 / (1.0 - self.alpha));
                if r <= 1.0 {
                    return Ok(r);
                }
            }
            _ => {}
        }
        self.bisect_radius(p, target_mu, r_max)
    }

    fn bisect_radius(&self, p: &Point, target_mu: f64, r_max: f64) -> Result<f64, MeasureError> {
        // Geometric bisection first, so tiny targets converge in few steps.
        let mut lo = r_max;
        while self.mu_ball(p, lo)? > target_mu {
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(lo);
            }
        }
        let mut hi = (2.0 * lo).min(r_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mu_ball(p, mid)? < target_mu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu_lo = self.mu_ball(p, lo)?;
        let mu_hi = self.mu_ball(p, hi)?;
        Ok(if (mu_hi - target_mu).abs() <= (target_mu - mu_lo).abs() {
            hi
        } else {
            lo
        })
    }
}

/// Portions of `[p − r, p + r]` on either side of `p` that lie inside `[0, 1]`.
fn gaps(p: f64, r: f64) -> (f64, f64) {
    (r.min(p), r.min(1.0 - p))
}

/// Arcsine mass of `[p − lo, p + hi]` via `sin(A − B)`, free of cancellation.
fn arcsine_mass(p: f64, lo: f64, hi: f64) -> f64 {
    let a = (p - lo).max(0.0);
    let b = (p + hi).min(1.0);
    let width = lo + hi;
    let denom = (b * (1.0 - a)).sqrt() + (a * (1.0 - b)).sqrt();
    if denom == 0.0 {
        return 1.0;
    }
    2.0 / PI * (width / denom).min(1.0).asin()
}

/// Area of a Euclidean disc of radius `r` on the unit torus (disc ∩ unit square
/// centred on `p`).
fn torus_disc_area(r: f64) -> f64 {
    if r <= 0.5 {
        PI * r * r
    } else if r < FRAC_1_SQRT_2 {
        let h = 0.5;
        let segment = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        PI * r * r - 4.0 * segment
    } else {
        1.0
    }
}

/// Long-orbit estimates of the LSV invariant measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LsvCalibration {
    pub alpha: f64,
    pub samples: u64,
    /// Least-squares constant `c` in `μ([0, x]) ≈ c x^{1−α}` over `[1e-4, 1e-2]`.
    pub origin_constant: f64,
    /// Log-log slope of `μ([0, x])` over the same range; should be near `1 − α`.
    pub origin_slope: f64,
    pub origin_grid: Vec<(f64, f64)>,
    pub cdf: Arc<EmpiricalCdf>,
}

pub const CALIBRATION_SAMPLES: u64 = 10_000_000;
pub const CALIBRATION_BINS: usize = 1 << 16;
const CALIBRATION_SEED: u64 = 0x5EED_CA11_B0A7_0001;
const ORIGIN_GRID_POINTS: usize = 21;

impl LsvCalibration {
    /// Calibration for `alpha`, built once per process.
    pub fn cached(alpha: f64) -> Arc<LsvCalibration> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<LsvCalibration>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("calibration cache poisoned");
        guard
            .entry(alpha.to_bits())
            .or_insert_with(|| Arc::new(Self::build(alpha, CALIBRATION_SAMPLES, CALIBRATION_SEED)))
            .clone()
    }

    pub fn build(alpha: f64, samples: u64, seed: u64) -> Self {
        let system = SystemDescriptor::lsv(alpha).expect("calibration requires 0 ≤ α < 1");
        debug_assert_eq!(system.id, SystemId::Lsv);
        let mut state = OrbitState::sample_invariant(&system, ChaCha8Rng::seed_from_u64(seed));

        let thresholds: Vec<f64> = (0..ORIGIN_GRID_POINTS)
            .map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / (ORIGIN_GRID_POINTS - 1) as f64))
            .collect();
        let top = thresholds[ORIGIN_GRID_POINTS - 1];
        let mut below = vec![0u64; ORIGIN_GRID_POINTS];
        let mut counts = vec![0u64; CALIBRATION_BINS];
        for _ in 0..samples {
            state.step(&system);
            let x = state.coordinate().unwrap_or(0.0);
            counts[((x * CALIBRATION_BINS as f64) as usize).min(CALIBRATION_BINS - 1)] += 1;
            if x < top {
                below[thresholds.partition_point(|&t| t <= x)] += 1;
            }
        }
        // below[i] counts samples in [t_{i-1}, t_i); accumulate to masses of [0, t_i).
        let mut running = 0u64;
        let origin_grid: Vec<(f64, f64)> = thresholds
            .iter()
            .zip(&below)
            .map(|(&t, &c)| {
                running += c;
                (t, running as f64 / samples as f64)
            })
            .collect();

        let exponent = 1.0 - alpha;
        let (num, den) = origin_grid.iter().fold((0.0, 0.0), |(n, d), &(t, m)| {
            let basis = t.powf(exponent);
            (n + m * basis, d + basis * basis)
        });
        let origin_constant = num / den;
        let logs: Vec<(f64, f64)> = origin_grid
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|&(t, m)| (t.ln(), m.ln()))
            .collect();
        let origin_slope = least_squares_slope(&logs);

        LsvCalibration {
            alpha,
            samples,
            origin_constant,
            origin_slope,
            origin_grid,
            cdf: Arc::new(EmpiricalCdf::from_counts(&counts)),
        }
    }
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
