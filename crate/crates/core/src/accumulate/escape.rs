use crate::dynamics::SystemDescriptor;
use crate::error::AccumulateError;

/// Escape threshold used when none is given.
pub const DEFAULT_EPSILON0: f64 = 0.25;

/// Iterates an LSV orbit injected at `m^{-γ}` needs before leaving `[0, ε₀]`.
///
/// The orbit starts at `x = 1/2 + 1/(2 m^γ)`, whose image under the right
/// branch is `m^{-γ}`; that image is formed directly to avoid the rounding of
/// `2x − 1`. Each further step inside `[0, ε₀]` counts once. A start already
/// above `ε₀` gives 0.
pub fn escape_time(alpha: f64, m: f64, gamma: f64, epsilon0: f64) -> Result<u64, AccumulateError> {
    let system = SystemDescriptor::lsv(alpha)?;
    let bad = |msg: String| Err(AccumulateError::InvalidParameter(msg));
    if alpha == 0.0 {
        return bad("escape time needs α > 0".into());
    }
    if !(m >= 2.0 && m.is_finite()) {
        return bad(format!("m must be at least 2, got {m}"));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return bad(format!("γ must be at least 1, got {gamma}"));
    }
    if !(epsilon0 > 0.0 && epsilon0 < 0.5) {
        return bad(format!("ε₀ must lie in (0, 1/2), got {epsilon0}"));
    }
    let mut y = m.powf(-gamma);
    // Below this the relative increment (2y)^α is lost to rounding and the
    // float orbit would stall.
    if !((2.0 * y).powf(alpha) > f64::EPSILON) {
        return bad(format!(
            "injection point m^-γ = {y:e} is too close to 0 for α = {alpha} in double precision"
        ));
    }
    let mut count = 0u64;
    while y <= epsilon0 {
        y = crate::dynamics::lsv_step(y, system.alpha)?;
        count += 1;
    }
    Ok(count)
}
