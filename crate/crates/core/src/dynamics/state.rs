use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maps::{catmap_step, logistic_unchecked, lsv_unchecked};
use super::reservoir::BitReservoir;
use super::{Point, Representation, SystemDescriptor, SystemId};

/// Distances are clamped below at `2^-63` so that `d^-k` stays finite.
pub const MIN_DISTANCE: f64 = 1.0 / 9_223_372_036_854_775_808.0;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// Discarded steps before an LSV orbit starts accumulating.
pub const LSV_BURN_IN: u64 = 10_000;

/// A point of the 2-torus as a pair of fractions `x / 2^64`, `y / 2^64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: u64,
    pub y: u64,
}

impl TorusPoint {
    pub fn from_unit(x: f64, y: f64) -> Self {
        TorusPoint {
            x: unit_to_fixed(x),
            y: unit_to_fixed(y),
        }
    }

    pub fn to_unit(self) -> (f64, f64) {
        (self.x as f64 / TWO_POW_64, self.y as f64 / TWO_POW_64)
    }
}

/// Nearest fixed-point fraction; 1.0 wraps to 0 on the torus.
fn unit_to_fixed(v: f64) -> u64 {
    let scaled = (v.rem_euclid(1.0) * TWO_POW_64).round();
    if scaled >= TWO_POW_64 {
        0
    } else {
        scaled as u64
    }
}

/// The evolving point of an orbit in the representation its system requires.
#[derive(Debug, Clone)]
pub enum OrbitState {
    Float(f64),
    Bits(BitReservoir),
    /// Tent orbit `y` standing for the logistic point `sin²(πy/2)`.
    Conjugate(BitReservoir),
    Fixed(TorusPoint),
}

impl OrbitState {
    /// Draws a state from the invariant measure of `system`.
    ///
    /// Lebesgue systems take PRNG bits directly, the logistic map uses
    /// `sin²(πu/2)` with `u` uniform (the bits of `u` seed its conjugate tent
    /// orbit), and LSV starts uniform and discards [`LSV_BURN_IN`] steps.
    pub fn sample_invariant(system: &SystemDescriptor, mut rng: ChaCha8Rng) -> Self {
        match system.representation {
            Representation::BitReservoir => OrbitState::Bits(BitReservoir::from_rng(rng)),
            Representation::ConjugateBitReservoir => {
                OrbitState::Conjugate(BitReservoir::from_rng(rng))
            }
            Representation::FixedPoint64 => OrbitState::Fixed(TorusPoint {
                x: rng.gen(),
                y: rng.gen(),
            }),
            Representation::Float64 => match system.id {
                SystemId::Logistic => {
                    let u: f64 = rng.gen();
                    let s = (std::f64::consts::FRAC_PI_2 * u).sin();
                    OrbitState::Float(s * s)
                }
                _ => {
                    let mut state = OrbitState::Float(rng.gen());
                    for _ in 0..LSV_BURN_IN {
                        state.step(system);
                    }
                    state
                }
            },
        }
    }

    #[inline]
    pub fn step(&mut self, system: &SystemDescriptor) {
        match self {
            OrbitState::Float(x) => {
                *x = match system.id {
                    SystemId::Logistic => logistic_unchecked(*x),
                    _ => lsv_unchecked(*x, system.alpha),
                }
            }
            OrbitState::Bits(bits) => match system.id {
                SystemId::Tent => bits.tent_step(),
                _ => bits.doubling_step(),
            },
            OrbitState::Conjugate(bits) => bits.tent_step(),
            OrbitState::Fixed(p) => *p = catmap_step(*p),
        }
    }

    /// Coordinate of a one-dimensional state, rounded to `f64`.
    pub fn coordinate(&self) -> Option<f64> {
        match self {
            OrbitState::Float(x) => Some(*x),
            OrbitState::Bits(bits) => Some(bits.value()),
            OrbitState::Conjugate(bits) => Some(sine_squared(bits.value())),
            OrbitState::Fixed(_) => None,
        }
    }
}

/// Metric distance from the state to `p`, clamped below at [`MIN_DISTANCE`].
///
/// One-dimensional systems use the interval metric `|x − p|`; the torus uses the
/// Euclidean metric with per-coordinate wrap-around.
///
/// # Panics
///
/// If the dimension of `p` does not match the state.
#[inline]
pub fn distance(state: &OrbitState, p: &Point) -> f64 {
    Anchor::new(p).distance(state)
}

/// A point converted once into the representation used by orbit states.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Anchor {
    Line(f64),
    Torus(TorusPoint),
}

impl Anchor {
    pub(crate) fn new(p: &Point) -> Self {
        match *p {
            Point::Line(x) => Anchor::Line(x),
            Point::Torus(x, y) => Anchor::Torus(TorusPoint::from_unit(x, y)),
        }
    }

    #[inline]
    pub(crate) fn distance(&self, state: &OrbitState) -> f64 {
        let raw = match (state, self) {
            (OrbitState::Float(x), Anchor::Line(q)) => (x - q).abs(),
            (OrbitState::Bits(bits), Anchor::Line(q)) => (bits.value() - q).abs(),
            (OrbitState::Conjugate(bits), Anchor::Line(q)) => conjugate_gap(bits.head(), *q),
            (OrbitState::Fixed(t), Anchor::Torus(target)) => {
                let dx = wrapped_gap(t.x, target.x);
                let dy = wrapped_gap(t.y, target.y);
                dx.hypot(dy)
            }
            _ => panic!("point dimension does not match the orbit state"),
        };
        raw.max(MIN_DISTANCE)
    }
}

#[inline]
fn sine_squared(y: f64) -> f64 {
    let s = (std::f64::consts::FRAC_PI_2 * y).sin();
    s * s
}

/// `|sin²(πy/2) − q|` for `y = head / 2^64`. Points in the upper half are
/// measured from 1 through `1 − x = sin²(π(1 − y)/2)`, so that distances to
/// both endpoints keep full relative precision.
#[inline]
fn conjugate_gap(head: u64, q: f64) -> f64 {
    if q <= 0.5 {
        (sine_squared(head as f64 / TWO_POW_64) - q).abs()
    } else {
        let z = if head == 0 {
            1.0
        } else {
            head.wrapping_neg() as f64 / TWO_POW_64
        };
        (sine_squared(z) - (1.0 - q)).abs()
    }
}

/// `min(|Δ|, 1 − |Δ|)` for fixed-point fractions, exact before the final rounding.
#[inline]
fn wrapped_gap(a: u64, b: u64) -> f64 {
    (a.wrapping_sub(b) as i64).unsigned_abs() as f64 / TWO_POW_64
}
