use crate::error::DynamicsError;

use super::state::TorusPoint;

/// The toral automorphism iterated by [`catmap_step`].
pub const CATMAP_MATRIX: [[i64; 2]; 2] = [[2, 1], [1, 1]];

const DOMAIN_SLACK: f64 = f64::EPSILON;

fn check_unit(x: f64) -> Result<(), DynamicsError> {
    if (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        Ok(())
    } else {
        Err(DynamicsError::OutOfDomain { value: x })
    }
}

/// LSV intermittent map `x + 2^α x^{1+α}` on `[0, 1/2]`, `2x − 1` on `(1/2, 1]`.
pub fn lsv_step(x: f64, alpha: f64) -> Result<f64, DynamicsError> {
    check_unit(x)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(DynamicsError::InvalidParameter(format!(
            "lsv requires 0 ≤ α < 1, got α = {alpha}"
        )));
    }
    Ok(lsv_unchecked(x, alpha))
}

/// The left branch is evaluated as `x (1 + (2x)^α)`, which equals
/// `x + 2^α x^{1+α}` and cannot round above 1 for `x ≤ 1/2`.
#[inline]
pub(crate) fn lsv_unchecked(x: f64, alpha: f64) -> f64 {
    let y = if x <= 0.5 {
        x * (1.0 + (2.0 * x).powf(alpha))
    } else {
        2.0 * x - 1.0
    };
    debug_assert!(
        (0.0..=1.0).contains(&y),
        "lsv left the unit interval: {x} -> {y}"
    );
    y
}

/// Logistic map `4x(1 − x)`.
pub fn logistic_step(x: f64) -> Result<f64, DynamicsError> {
    check_unit(x)?;
    Ok(logistic_unchecked(x))
}

#[inline]
pub(crate) fn logistic_unchecked(x: f64) -> f64 {
    let y = 4.0 * x * (1.0 - x);
    debug_assert!(
        (0.0..=1.0).contains(&y),
        "logistic left the unit interval: {x} -> {y}"
    );
    y
}

/// `(x, y) ↦ (2x + y, x + y) mod 1` on the 64-bit fixed-point torus.
#[inline]
pub fn catmap_step(p: TorusPoint) -> TorusPoint {
    TorusPoint {
        x: p.x.wrapping_add(p.x).wrapping_add(p.y),
        y: p.x.wrapping_add(p.y),
    }
}

/// Inverse automorphism `[[1, −1], [−1, 2]]`.
#[inline]
pub fn catmap_inverse(p: TorusPoint) -> TorusPoint {
    TorusPoint {
        x: p.x.wrapping_sub(p.y),
        y: p.y.wrapping_add(p.y).wrapping_sub(p.x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lsv_examples() {
        assert_eq!(lsv_step(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(lsv_step(0.5, 0.7).unwrap(), 1.0);
        assert_eq!(lsv_step(0.75, 0.3).unwrap(), 0.5);
        assert_eq!(lsv_step(0.75, 0.9).unwrap(), 0.5);
        assert!(lsv_step(1.5, 0.5).is_err());
        assert!(lsv_step(-0.1, 0.5).is_err());
    }

    #[test]
    fn lsv_alpha_one_arithmetic() {
        // α = 1 is outside the probability regime, so check the formula directly.
        assert_eq!(lsv_unchecked(0.25, 1.0), 0.375);
    }

    #[test]
    fn lsv_branches_at_half() {
        for alpha in [0.0, 0.1, 0.5, 0.6, 0.99] {
            assert_eq!(lsv_unchecked(0.5, alpha), 1.0);
            assert_eq!(2.0 * 0.5 - 1.0, 0.0);
        }
    }

    #[test]
    fn lsv_left_branch_monotone_on_grid() {
        for alpha in [0.1, 0.5, 0.9] {
            let mut prev = -1.0;
            for i in 0..=100_000 {
                let x = 0.5 * i as f64 / 100_000.0;
                let y = lsv_unchecked(x, alpha);
                assert!(y >= prev, "not monotone at x={x}");
                assert!(y <= 1.0);
                prev = y;
            }
        }
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic_step(0.5).unwrap(), 1.0);
        assert_eq!(logistic_step(0.75).unwrap(), 0.75);
        assert_eq!(logistic_step(0.0).unwrap(), 0.0);
        assert!(logistic_step(1.01).is_err());
    }

    #[test]
    fn logistic_stays_in_interval_near_critical_point() {
        let mut x = 0.5f64;
        for _ in 0..1_000_000 {
            x = f64::from_bits(x.to_bits() - 1);
            assert!(logistic_unchecked(x) <= 1.0);
        }
        let mut x = 0.5f64;
        for _ in 0..1_000_000 {
            x = f64::from_bits(x.to_bits() + 1);
            assert!(logistic_unchecked(x) <= 1.0);
        }
    }

    #[test]
    fn catmap_examples() {
        let zero = TorusPoint { x: 0, y: 0 };
        assert_eq!(catmap_step(zero), zero);
        let half = 1u64 << 63;
        assert_eq!(
            catmap_step(TorusPoint { x: half, y: half }),
            TorusPoint { x: half, y: 0 }
        );
    }

    proptest! {
        #[test]
        fn catmap_is_bijective(x in any::<u64>(), y in any::<u64>()) {
            let p = TorusPoint { x, y };
            prop_assert_eq!(catmap_inverse(catmap_step(p)), p);
            prop_assert_eq!(catmap_step(catmap_inverse(p)), p);
        }

        #[test]
        fn lsv_stays_in_unit_interval(x in 0.0f64..=1.0, alpha in 0.0f64..0.999) {
            let y = lsv_step(x, alpha).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn logistic_stays_in_unit_interval(x in 0.0f64..=1.0) {
            let y = logistic_step(x).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }
    }
}
