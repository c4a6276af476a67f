//! The maps under study and the numeric representations that keep their long
//! orbits statistically faithful.
//!
//! * Doubling and tent maps act on an exact binary expansion ([`BitReservoir`]).
//!   Iterating them in floating point collapses every orbit onto 0 within about
//!   53 steps, since multiplication by two is exact in binary.
//! * The cat map acts on a 64-bit fixed-point lattice, where the integer matrix
//!   action is exact.
//! * The logistic map is iterated through its conjugacy `x = sin²(πy/2)` with
//!   the tent map, whose orbit `y` lives on a bit reservoir. Plain `f64`
//!   logistic orbits fall into short numerical cycles (periods such as
//!   5 638 349) or onto the fixed point 0 well within `10^7` steps.
//! * The intermittent (LSV) map uses `f64` pseudo-orbits.

mod maps;
mod reservoir;
mod state;

pub use maps::{catmap_inverse, catmap_step, logistic_step, lsv_step, CATMAP_MATRIX};
pub use reservoir::{BitReservoir, RESERVOIR_LOOKAHEAD};
pub(crate) use state::Anchor;
pub use state::{distance, OrbitState, TorusPoint, LSV_BURN_IN, MIN_DISTANCE};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemId {
    Lsv,
    Doubling,
    Tent,
    Logistic,
    CatMap,
}

impl SystemId {
    pub fn name(self) -> &'static str {
        match self {
            SystemId::Lsv => "lsv",
            SystemId::Doubling => "doubling",
            SystemId::Tent => "tent",
            SystemId::Logistic => "logistic",
            SystemId::CatMap => "catmap",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SystemId {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lsv" => Ok(SystemId::Lsv),
            "doubling" => Ok(SystemId::Doubling),
            "tent" => Ok(SystemId::Tent),
            "logistic" => Ok(SystemId::Logistic),
            "catmap" | "cat" => Ok(SystemId::CatMap),
            other => Err(DynamicsError::InvalidParameter(format!(
                "unknown system '{other}' (expected lsv, doubling, tent, logistic or catmap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Float64,
    BitReservoir,
    /// Bit reservoir of a conjugate tent orbit `y`, observed as `sin²(πy/2)`.
    ConjugateBitReservoir,
    FixedPoint64,
}

/// Shape of the invariant density, which decides how ball measures are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityRegime {
    /// Lebesgue measure (doubling, tent, cat map).
    LebesgueLike,
    /// Arcsine density `1 / (π √(x(1−x)))` of the logistic map.
    ArcsineBoundary,
    /// LSV density, blowing up like `x^-alpha` at the neutral fixed point.
    IntermittentOrigin,
}

/// Immutable identity of a map together with the representation used to iterate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub id: SystemId,
    /// Intermittency exponent; zero for every system except LSV.
    pub alpha: f64,
    pub dimension: u8,
    pub representation: Representation,
    pub density_regime: DensityRegime,
}

impl SystemDescriptor {
    pub fn new(id: SystemId, alpha: f64) -> Result<Self, DynamicsError> {
        match id {
            SystemId::Lsv => Self::lsv(alpha),
            _ if alpha != 0.0 => Err(DynamicsError::InvalidParameter(format!(
                "alpha applies to lsv only, got alpha = {alpha} for {id}"
            ))),
            SystemId::Doubling => Ok(Self::doubling()),
            SystemId::Tent => Ok(Self::tent()),
            SystemId::Logistic => Ok(Self::logistic()),
            SystemId::CatMap => Ok(Self::catmap()),
        }
    }

    /// LSV map with intermittency exponent `alpha`.
    ///
    /// At `alpha = 0` the map is exactly the doubling map, whose float orbits
    /// collapse, so it is iterated on a bit reservoir instead.
    pub fn lsv(alpha: f64) -> Result<Self, DynamicsError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(DynamicsError::InvalidParameter(format!(
                "lsv requires 0 ≤ α < 1, got α = {alpha}"
            )));
        }
        let representation = if alpha == 0.0 {
            Representation::BitReservoir
        } else {
            Representation::Float64
        };
        Ok(SystemDescriptor {
            id: SystemId::Lsv,
            alpha,
            dimension: 1,
            representation,
            density_regime: DensityRegime::IntermittentOrigin,
        })
    }

    pub fn doubling() -> Self {
        SystemDescriptor {
            id: SystemId::Doubling,
            alpha: 0.0,
            dimension: 1,
            representation: Representation::BitReservoir,
            density_regime: DensityRegime::LebesgueLike,
        }
    }

    pub fn tent() -> Self {
        SystemDescriptor {
            id: SystemId::Tent,
            alpha: 0.0,
            dimension: 1,
            representation: Representation::BitReservoir,
            density_regime: DensityRegime::LebesgueLike,
        }
    }

    pub fn logistic() -> Self {
        SystemDescriptor {
            id: SystemId::Logistic,
            alpha: 0.0,
            dimension: 1,
            representation: Representation::ConjugateBitReservoir,
            density_regime: DensityRegime::ArcsineBoundary,
        }
    }

    pub fn catmap() -> Self {
        SystemDescriptor {
            id: SystemId::CatMap,
            alpha: 0.0,
            dimension: 2,
            representation: Representation::FixedPoint64,
            density_regime: DensityRegime::LebesgueLike,
        }
    }

    /// Checks that `p` lies in the phase space and returns warnings for points
    /// that are legal but numerically or theoretically special.
    pub fn check_point(&self, p: &Point) -> Result<Vec<String>, DynamicsError> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        match (self.dimension, p) {
            (1, Point::Line(x)) if in_unit(*x) => {
                let mut warnings = Vec::new();
                if *x == 0.5
                    && matches!(self.id, SystemId::Lsv | SystemId::Doubling | SystemId::Tent)
                {
                    warnings.push(format!(
                        "p = 1/2 sits on the branch discontinuity of the {} map",
                        self.id
                    ));
                }
                Ok(warnings)
            }
            (2, Point::Torus(x, y)) if in_unit(*x) && in_unit(*y) => Ok(Vec::new()),
            _ => Err(DynamicsError::PointOutsidePhaseSpace(p.to_string())),
        }
    }
}

/// A point of phase space: the unit interval or the unit 2-torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Line(f64),
    Torus(f64, f64),
}

impl Point {
    pub fn dimension(&self) -> u8 {
        match self {
            Point::Line(_) => 1,
            Point::Torus(..) => 2,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line(x) => write!(f, "{x}"),
            Point::Torus(x, y) => write!(f, "{x},{y}"),
        }
    }
}

impl std::str::FromStr for Point {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| DynamicsError::PointOutsidePhaseSpace(s.to_string()))
        };
        let parts: Vec<&str> = s.split(',').collect();
        match parts.as_slice() {
            [x] => Ok(Point::Line(parse(x)?)),
            [x, y] => Ok(Point::Torus(parse(x)?, parse(y)?)),
            _ => Err(DynamicsError::PointOutsidePhaseSpace(s.to_string())),
        }
    }
}
