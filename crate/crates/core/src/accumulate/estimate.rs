use serde::{Deserialize, Serialize};

use crate::error::AccumulateError;
use crate::measure::least_squares_slope;

use super::orbit::CheckpointRecord;
use super::top::B_MAX;

/// Minimum number of trailing-decade checkpoints for a slope fit.
pub const MIN_WINDOW_POINTS: usize = 4;
/// Minimum number of checkpoints for the maxima fluctuation diagnostic.
pub const MIN_FLUCTUATION_CHECKPOINTS: usize = 8;
/// Checkpoints below this time are ignored by [`mn_fluctuation`].
pub const FLUCTUATION_START: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// Least-squares slope of `log S_n` on `log n` over `n ≥ n_final / 10`.
    pub slope: f64,
    /// `log S_n / log n` at the final checkpoint.
    pub pointwise: f64,
    pub window_points: usize,
}

/// Fits the growth exponent over the trailing decade of checkpoints.
pub fn estimate_exponent(
    checkpoints: &[CheckpointRecord],
) -> Result<ExponentEstimate, AccumulateError> {
    let series: Vec<(u64, f64)> = checkpoints.iter().map(|c| (c.n, c.s_n)).collect();
    estimate_exponent_series(&series)
}

/// [`estimate_exponent`] on raw `(n, S_n)` pairs in increasing `n`.
pub fn estimate_exponent_series(
    series: &[(u64, f64)],
) -> Result<ExponentEstimate, AccumulateError> {
    let &(n_final, s_final) = series.last().ok_or(AccumulateError::InsufficientData {
        needed: MIN_WINDOW_POINTS,
        got: 0,
    })?;
    let window: Vec<(f64, f64)> = series
        .iter()
        .filter(|(n, s)| n.saturating_mul(10) >= n_final && *s > 0.0)
        .map(|&(n, s)| ((n as f64).ln(), s.ln()))
        .collect();
    if window.len() < MIN_WINDOW_POINTS {
        return Err(AccumulateError::InsufficientData {
            needed: MIN_WINDOW_POINTS,
            got: window.len(),
        });
    }
    Ok(ExponentEstimate {
        slope: least_squares_slope(&window),
        pointwise: s_final.ln() / (n_final as f64).ln(),
        window_points: window.len(),
    })
}

/// `S_n` minus the `b` largest observable values seen so far.
pub fn trimmed_sum(record: &CheckpointRecord, b: usize) -> Result<f64, AccumulateError> {
    if b > B_MAX {
        return Err(AccumulateError::TrimTooLarge { b, b_max: B_MAX });
    }
    let removed: f64 = record.top_terms.iter().take(b).sum();
    Ok(record.s_n - removed)
}

/// Spread of `M_n / n^s` over checkpoints with `n ≥ 10^4`: the ratio of its
/// largest to its smallest value. Without an almost-sure limit for the
/// normalized maxima this ratio keeps growing with the orbit length.
pub fn mn_fluctuation(
    checkpoints: &[CheckpointRecord],
    scaling_exponent: f64,
) -> Result<f64, AccumulateError> {
    if checkpoints.len() < MIN_FLUCTUATION_CHECKPOINTS {
        return Err(AccumulateError::InsufficientData {
            needed: MIN_FLUCTUATION_CHECKPOINTS,
            got: checkpoints.len(),
        });
    }
    let normalized: Vec<f64> = checkpoints
        .iter()
        .filter(|c| c.n >= FLUCTUATION_START)
        .map(|c| c.m_n / (c.n as f64).powf(scaling_exponent))
        .collect();
    if normalized.is_empty() {
        return Err(AccumulateError::InsufficientData { needed: 1, got: 0 });
    }
    let max = normalized.iter().copied().fold(f64::MIN, f64::max);
    let min = normalized.iter().copied().fold(f64::MAX, f64::min);
    Ok(max / min)
}

/// Fraction of checkpoints with `n ≥ 3` at which `S_n ≥ n^e (log n)^e`.
///
/// For bounded densities with `e = k/D` this lower envelope is crossed
/// infinitely often, which no finite orbit can confirm; the fraction is a
/// descriptive statistic only.
pub fn envelope_occupation(checkpoints: &[CheckpointRecord], exponent: f64) -> Option<f64> {
    let eligible: Vec<&CheckpointRecord> = checkpoints.iter().filter(|c| c.n >= 3).collect();
    if eligible.is_empty() {
        return None;
    }
    let above = eligible
        .iter()
        .filter(|c| {
            let n = c.n as f64;
            c.s_n >= (n * n.ln()).powf(exponent)
        })
        .count();
    Some(above as f64 / eligible.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::orbit::{checkpoint_times, default_checkpoint_ratio};

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<(u64, f64)> {
        checkpoint_times(10_000_000, default_checkpoint_ratio())
            .into_iter()
            .filter(|&n| n >= 1000)
            .map(|n| (n, f(n as f64)))
            .collect()
    }

    fn record(n: u64, s_n: f64, m_n: f64, top: Vec<f64>) -> CheckpointRecord {
        CheckpointRecord {
            n,
            s_n,
            m_n,
            hits: 0,
            e_n: 1.0,
            last_hit_index: 0,
            top_terms: top,
            aaronson_ratio: f64::NAN,
        }
    }

    #[test]
    fn exact_power_law() {
        let est = estimate_exponent_series(&synthetic(|n| n * n)).unwrap();
        assert!((est.slope - 2.0).abs() < 1e-9);
        assert!((est.pointwise - 2.0).abs() < 1e-12);
        assert_eq!(est.window_points, 9);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let est = estimate_exponent_series(&synthetic(|_| 42.0)).unwrap();
        assert!(est.slope.abs() < 1e-12);
    }

    /// Independent oracle: the least-squares slope of `1.5 u + ln u` on `u = ln n`
    /// over the trailing-decade grid, accumulated in closed form.
    #[test]
    fn power_law_with_log_correction() {
        let series = synthetic(|n| n.powf(1.5) * n.ln());
        let est = estimate_exponent_series(&series).unwrap();

        let us: Vec<f64> = (48..=56).map(|i| f64::from(i) / 8.0 * 10f64.ln()).collect();
        let mean_u = us.iter().sum::<f64>() / 9.0;
        let mean_v = us.iter().map(|u| u.ln()).sum::<f64>() / 9.0;
        let cov: f64 = us.iter().map(|u| (u - mean_u) * (u.ln() - mean_v)).sum();
        let var: f64 = us.iter().map(|u| (u - mean_u).powi(2)).sum();
        let oracle = 1.5 + cov / var;

        assert!((oracle - 1.566_86).abs() < 1e-4, "oracle {oracle}");
        assert!(
            (est.slope - oracle).abs() < 1e-6,
            "{} vs {oracle}",
            est.slope
        );
    }

    #[test]
    fn too_few_points() {
        let series = vec![(100, 1.0), (1000, 2.0), (10_000, 3.0)];
        assert!(matches!(
            estimate_exponent_series(&series),
            Err(AccumulateError::InsufficientData { .. })
        ));
        assert!(estimate_exponent_series(&[]).is_err());
    }

    #[test]
    fn trimming() {
        let r = record(3, 9.0, 5.0, vec![5.0, 3.0, 1.0]);
        assert_eq!(trimmed_sum(&r, 1).unwrap(), 4.0);
        assert_eq!(trimmed_sum(&r, 0).unwrap(), 9.0);
        assert!((trimmed_sum(&r, 3).unwrap()).abs() < 1e-15);
        let big = record(100, 1e3, 10.0, vec![10.0; B_MAX]);
        assert!(matches!(
            trimmed_sum(&big, 100),
            Err(AccumulateError::TrimTooLarge { .. })
        ));
    }

    #[test]
    fn envelope_occupation_counts_crossings() {
        let recs: Vec<CheckpointRecord> = [1u64, 10, 100, 1000]
            .iter()
            .map(|&n| {
                let n_f = n as f64;
                let envelope = n_f * n_f.ln();
                let s = if n == 100 {
                    2.0 * envelope
                } else {
                    0.5 * envelope
                };
                record(n, s, s, vec![s])
            })
            .collect();
        assert_eq!(envelope_occupation(&recs, 1.0), Some(1.0 / 3.0));
        assert_eq!(envelope_occupation(&recs[..1], 1.0), None);
    }

    #[test]
    fn fluctuation_of_exact_scaling_is_one() {
        let recs: Vec<CheckpointRecord> = checkpoint_times(10_000_000, default_checkpoint_ratio())
            .into_iter()
            .map(|n| {
                let m = (n as f64).powf(1.3);
                record(n, m, m, vec![m])
            })
            .collect();
        assert!((mn_fluctuation(&recs, 1.3).unwrap() - 1.0).abs() < 1e-12);
        assert!(mn_fluctuation(&recs[..1], 1.0).is_err());
    }
}
