//! Observables singular at a distinguished point `p`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{distance, OrbitState, Point, SystemDescriptor};
use crate::error::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservableKind {
    /// `d(x, p)^-k`
    PowerDistance,
    /// `-log d(x, p)`, integrable; used only as a contrast for the maxima.
    LogDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub p: Point,
    pub k: f64,
}

impl ObservableSpec {
    pub fn power(p: Point, k: f64) -> Result<Self, DynamicsError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!(
                "observable exponent must satisfy k > 0, got k = {k}"
            )));
        }
        Ok(ObservableSpec {
            kind: ObservableKind::PowerDistance,
            p,
            k,
        })
    }

    pub fn log(p: Point) -> Self {
        ObservableSpec {
            kind: ObservableKind::LogDistance,
            p,
            k: 1.0,
        }
    }

    pub fn validate(&self, system: &SystemDescriptor) -> Result<Vec<String>, DynamicsError> {
        if self.kind == ObservableKind::PowerDistance && !(self.k > 0.0 && self.k.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!(
                "observable exponent must satisfy k > 0, got k = {}",
                self.k
            )));
        }
        system.check_point(&self.p)
    }

    /// Observable value at a given (already clamped) distance.
    #[inline]
    pub fn at_distance(&self, d: f64) -> f64 {
        match self.kind {
            ObservableKind::PowerDistance => {
                if self.k.fract() == 0.0 && self.k <= i32::MAX as f64 {
                    d.powi(-(self.k as i32))
                } else {
                    d.powf(-self.k)
                }
            }
            ObservableKind::LogDistance => -d.ln(),
        }
    }

    pub fn evaluate(&self, state: &OrbitState) -> f64 {
        self.at_distance(distance(state, &self.p))
    }
}
