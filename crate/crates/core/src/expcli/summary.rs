use serde::Serialize;

use crate::accumulate::{envelope_occupation, RunResult, RunStatus};
use crate::measure::{predicted_exponent, Prediction, RegimeLabel};
use crate::observables::ObservableKind;

use super::config::{ExperimentConfig, ExponentMetric};

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_finite(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

impl Quantiles {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v = sorted_finite(values);
        (!v.is_empty()).then(|| Quantiles {
            q05: quantile(&v, 0.05),
            q25: quantile(&v, 0.25),
            q50: quantile(&v, 0.5),
            q75: quantile(&v, 0.75),
            q95: quantile(&v, 0.95),
        })
    }
}

/// Cross-orbit statistics of `log S_n / log n` at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointStats {
    pub n: u64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub orbits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverflowRecord {
    pub run_id: usize,
    pub seed: u64,
    pub at_n: u64,
}

/// Ensemble statistics over completed orbits; overflowed orbits are listed
/// separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub predicted_exponent: Option<f64>,
    pub prediction: Option<Prediction>,
    pub exponent_metric: ExponentMetric,
    /// Median over completed orbits of the per-orbit exponent estimate.
    pub median_exponent: Option<f64>,
    pub tolerance: f64,
    /// `|median_exponent − predicted_exponent| ≤ tolerance`.
    pub pass: Option<bool>,
    pub orbits: usize,
    pub completed: usize,
    pub overflowed: Vec<OverflowRecord>,
    pub checkpoints: Vec<CheckpointStats>,
    /// Quantiles of `hits / E_n` at the final checkpoint.
    pub sbc_ratio_quantiles: Option<Quantiles>,
    /// Quantiles of `(hits − E_n) / E_n^{1/2+δ}` at the final checkpoint.
    pub qsbc_residual_quantiles: Option<Quantiles>,
    /// Median fraction of checkpoints with `S_n ≥ (n log n)^{k/D}`, for
    /// bounded-density points with non-integrable observables. Reported
    /// without any threshold.
    pub envelope_occupation_median: Option<f64>,
}

impl EnsembleSummary {
    /// Fraction of orbits that overflowed.
    pub fn overflow_fraction(&self) -> f64 {
        self.overflowed.len() as f64 / self.orbits.max(1) as f64
    }
}

/// Per-orbit exponent under the configured metric.
pub(crate) fn orbit_exponent(run: &RunResult, metric: ExponentMetric) -> Option<f64> {
    match metric {
        ExponentMetric::Slope => run.exponent_estimate,
        ExponentMetric::Pointwise => Some(run.exponent_pointwise),
    }
}

pub fn summarize(cfg: &ExperimentConfig, runs: &[RunResult]) -> EnsembleSummary {
    let prediction = match cfg.observable.kind {
        ObservableKind::PowerDistance => {
            predicted_exponent(&cfg.system, &cfg.observable.p, cfg.observable.k).ok()
        }
        ObservableKind::LogDistance => None,
    };
    let predicted = prediction.as_ref().map(|p| p.exponent);

    let completed: Vec<&RunResult> = runs
        .iter()
        .filter(|r| r.status == RunStatus::Completed)
        .collect();
    let overflowed = runs
        .iter()
        .enumerate()
        .filter_map(|(run_id, r)| match r.status {
            RunStatus::Overflow { at_n } => Some(OverflowRecord {
                run_id,
                seed: r.seed,
                at_n,
            }),
            RunStatus::Completed => None,
        })
        .collect();

    let checkpoints = completed
        .first()
        .map(|first| {
            (0..first.checkpoints.len())
                .map(|i| {
                    let v = sorted_finite(completed.iter().map(|r| r.checkpoints[i].log_ratio()));
                    let (median, q25, q75) = if v.is_empty() {
                        (f64::NAN, f64::NAN, f64::NAN)
                    } else {
                        (quantile(&v, 0.5), quantile(&v, 0.25), quantile(&v, 0.75))
                    };
                    CheckpointStats {
                        n: first.checkpoints[i].n,
                        median,
                        q25,
                        q75,
                        orbits: v.len(),
                    }
                })
                .collect()
        })
        .unwrap_or_default();

    let exponents = sorted_finite(
        completed
            .iter()
            .filter_map(|r| orbit_exponent(r, cfg.exponent_metric)),
    );
    let median_exponent = (!exponents.is_empty()).then(|| quantile(&exponents, 0.5));
    let pass = match (median_exponent, predicted) {
        (Some(m), Some(p)) => Some((m - p).abs() <= cfg.tolerance),
        _ => None,
    };

    let envelope_occupation_median = prediction
        .as_ref()
        .filter(|p| p.regime_label == RegimeLabel::GenericBoundedDensity && !p.integrable)
        .and_then(|p| {
            let v = sorted_finite(
                completed
                    .iter()
                    .filter_map(|r| envelope_occupation(&r.checkpoints, p.exponent)),
            );
            (!v.is_empty()).then(|| quantile(&v, 0.5))
        });

    let finals = || {
        completed
            .iter()
            .map(|r| r.checkpoints.last().expect("non-empty"))
    };
    EnsembleSummary {
        predicted_exponent: predicted,
        prediction,
        exponent_metric: cfg.exponent_metric,
        median_exponent,
        tolerance: cfg.tolerance,
        pass,
        orbits: runs.len(),
        completed: completed.len(),
        overflowed,
        checkpoints,
        sbc_ratio_quantiles: Quantiles::of(finals().map(|c| c.sbc_ratio())),
        qsbc_residual_quantiles: Quantiles::of(finals().map(|c| c.qsbc_residual(cfg.delta))),
        envelope_occupation_median,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!((quantile(&v, 0.25) - 1.75).abs() < 1e-15);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }
}
