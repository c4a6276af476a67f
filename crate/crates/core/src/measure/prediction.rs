use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Point, SystemDescriptor, SystemId};
use crate::error::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    GenericBoundedDensity,
    IndifferentFixedPoint,
    SingularDensity,
}

/// Predicted almost-sure limit of `log S_n / log n` for `φ = d(·, p)^-k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub exponent: f64,
    pub regime_label: RegimeLabel,
    pub k: f64,
    #[serde(rename = "D")]
    pub dimension: u8,
    /// Exponent of the density singularity at `p` (zero for bounded densities).
    pub alpha: f64,
    /// `D − α` for singular densities, `1 − α` at the neutral fixed point, `D`
    /// otherwise. The observable is integrable exactly when `k < effective_dimension`.
    pub effective_dimension: f64,
    /// When set the Birkhoff average converges and the exponent is 1.
    pub integrable: bool,
    pub warnings: Vec<String>,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exponent {} ({:?})", self.exponent, self.regime_label)?;
        if self.integrable {
            write!(f, " [integrable observable: ergodic theorem]")?;
        }
        Ok(())
    }
}

/// Classifies the growth regime of `(system, p, k)` and returns the predicted exponent.
///
/// * LSV at the neutral fixed point `p = 0`: `k + α`.
/// * Logistic at `p ∈ {0, 1}`, where the density blows up like `d^{-1/2}`: `k / (1 − 1/2) = 2k`.
/// * Any point with bounded positive density: `k / D`.
///
/// Integrable observables get exponent 1 and a warning instead of an error.
pub fn predicted_exponent(
    system: &SystemDescriptor,
    p: &Point,
    k: f64,
) -> Result<Prediction, DynamicsError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(DynamicsError::InvalidParameter(format!(
            "observable exponent must satisfy k > 0, got k = {k}"
        )));
    }
    let mut warnings = system.check_point(p)?;
    let dim = f64::from(system.dimension);
    let at = |v: f64| matches!(p, Point::Line(x) if *x == v);

    let (regime_label, alpha, effective_dimension, exponent) = match system.id {
        SystemId::Lsv if at(0.0) => {
            let a = system.alpha;
            (RegimeLabel::IndifferentFixedPoint, a, 1.0 - a, k + a)
        }
        SystemId::Logistic if at(0.0) || at(1.0) => {
            let a = 0.5;
            (RegimeLabel::SingularDensity, a, dim - a, k / (dim - a))
        }
        _ => (RegimeLabel::GenericBoundedDensity, 0.0, dim, k / dim),
    };

    let integrable = k < effective_dimension;
    let exponent = if integrable {
        warnings.push(format!(
            "k = {k} < {effective_dimension}: the observable is integrable, so S_n grows linearly"
        ));
        1.0
    } else {
        exponent
    };

    Ok(Prediction {
        exponent,
        regime_label,
        k,
        dimension: system.dimension,
        alpha,
        effective_dimension,
        integrable,
        warnings,
    })
}
