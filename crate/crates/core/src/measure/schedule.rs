use serde::{Deserialize, Serialize};

use crate::dynamics::{Point, SystemDescriptor, SystemId};
use crate::error::MeasureError;

use super::ball::BallMeasureModel;

/// How the shrinking targets `B_j` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScheduleKind {
    /// `r_j = c j^{-1/D}`.
    RadiusPower { c: f64 },
    /// `μ(B_j) = min(1, c log^β j / j)`.
    MeasureHarmonic { c: f64, beta: f64 },
    /// `B_j = [0, j^{-γ})` at the LSV neutral fixed point.
    KimNonBc { gamma: f64 },
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::RadiusPower { .. } => "radius_power",
            ScheduleKind::MeasureHarmonic { .. } => "measure_harmonic",
            ScheduleKind::KimNonBc { .. } => "kim",
        }
    }
}

/// Radius and measure of one target ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub radius: f64,
    pub measure: f64,
}

/// Nested balls about `p`, evaluated by formula at each step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSchedule {
    pub kind: ScheduleKind,
    pub p: Point,
    pub model: BallMeasureModel,
    pub dimension: u8,
    pub n_max: u64,
    /// Index at which `log^β j / j` peaks; earlier targets reuse its measure so
    /// that the balls stay nested.
    harmonic_peak: u64,
}

impl TargetSchedule {
    pub fn build(
        kind: ScheduleKind,
        system: &SystemDescriptor,
        p: Point,
        n_max: u64,
    ) -> Result<Self, MeasureError> {
        Self::validate(&kind, system, &p)?;
        let model = BallMeasureModel::for_system(system, &p)?;
        Self::with_model(kind, system, p, model, n_max)
    }

    pub fn with_model(
        kind: ScheduleKind,
        system: &SystemDescriptor,
        p: Point,
        model: BallMeasureModel,
        n_max: u64,
    ) -> Result<Self, MeasureError> {
        Self::validate(&kind, system, &p)?;
        let harmonic_peak = match kind {
            ScheduleKind::MeasureHarmonic { beta, .. } => harmonic_peak(beta),
            _ => 1,
        };
        Ok(TargetSchedule {
            kind,
            p,
            model,
            dimension: system.dimension,
            n_max,
            harmonic_peak,
        })
    }

    /// Checks the schedule parameters against the system and base point.
    pub fn validate(
        kind: &ScheduleKind,
        system: &SystemDescriptor,
        p: &Point,
    ) -> Result<(), MeasureError> {
        let bad = |msg: String| Err(MeasureError::InvalidSchedule(msg));
        match *kind {
            ScheduleKind::RadiusPower { c } if !(c > 0.0 && c.is_finite()) => {
                bad(format!("radius_power needs c > 0, got {c}"))
            }
            ScheduleKind::MeasureHarmonic { c, beta } if !(c > 0.0 && beta >= 0.0) => bad(format!(
                "measure_harmonic needs c > 0 and β ≥ 0, got c = {c}, β = {beta}"
            )),
            ScheduleKind::KimNonBc { gamma } => {
                if system.id != SystemId::Lsv {
                    return bad("the kim schedule applies to the lsv map only".into());
                }
                if *p != Point::Line(0.0) {
                    return bad(format!("the kim schedule is based at p = 0, got p = {p}"));
                }
                let upper = 1.0 / (1.0 - system.alpha);
                if !(gamma > 1.0 && gamma <= upper) {
                    return bad(format!(
                        "the kim schedule requires 1 < γ ≤ 1/(1−α) = {upper}, got γ = {gamma}"
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The target ball for orbit step `j ≥ 1`.
    #[inline]
    pub fn target(&self, j: u64) -> Target {
        let jf = j as f64;
        match self.kind {
            ScheduleKind::RadiusPower { c } => {
                let radius = if self.dimension == 2 {
                    c / jf.sqrt()
                } else {
                    c / jf
                };
                Target {
                    radius,
                    measure: self.model.mu_ball(&self.p, radius).unwrap_or(0.0),
                }
            }
            ScheduleKind::MeasureHarmonic { c, beta } => {
                let i = j.max(self.harmonic_peak) as f64;
                let measure = (c * i.ln().powf(beta) / i).min(1.0);
                let radius = self
                    .model
                    .radius_for_measure(&self.p, measure)
                    .unwrap_or_else(|_| self.model.max_radius(&self.p));
                Target { radius, measure }
            }
            ScheduleKind::KimNonBc { gamma } => {
                let radius = jf.powf(-gamma);
                Target {
                    radius,
                    measure: self.model.mu_ball(&self.p, radius).unwrap_or(0.0),
                }
            }
        }
    }

    /// `E_n = Σ_{j ≤ n} μ(B_j)` at each requested `n` (ascending).
    pub fn expected_hits_at(&self, ns: &[u64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(ns.len());
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut j = 0u64;
        for &n in ns {
            while j < n {
                j += 1;
                let mu = self.target(j).measure;
                let t = sum + mu;
                comp += if sum.abs() >= mu.abs() {
                    (sum - t) + mu
                } else {
                    (mu - t) + sum
                };
                sum = t;
            }
            out.push(sum + comp);
        }
        out
    }
}

fn harmonic_peak(beta: f64) -> u64 {
    if beta <= 0.0 {
        return 1;
    }
    let f = |j: u64| (j as f64).ln().powf(beta) / j as f64;
    let lo = beta.exp().floor().max(1.0) as u64;
    if f(lo + 1) > f(lo) {
        lo + 1
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn doubling_schedule(kind: ScheduleKind, p: f64) -> TargetSchedule {
        TargetSchedule::build(
            kind,
            &SystemDescriptor::doubling(),
            Point::Line(p),
            10_000_000,
        )
        .unwrap()
    }

    #[test]
    fn radius_power_harmonic_sum() {
        let s = doubling_schedule(ScheduleKind::RadiusPower { c: 0.25 }, 0.3);
        let t = s.target(10);
        assert!((t.radius - 0.025).abs() < 1e-15);
        assert!((t.measure - 0.05).abs() < 1e-15);
        // μ_1 = 0.5, then exactly 1/(2j).
        let n = 1_000_000u64;
        let e = s.expected_hits_at(&[n])[0];
        let harmonic = (n as f64).ln() + EULER_GAMMA + 0.5 / n as f64;
        assert!((e - harmonic / 2.0).abs() < 1e-9, "{e}");
    }

    #[test]
    fn measure_harmonic_beta_zero() {
        let s = doubling_schedule(ScheduleKind::MeasureHarmonic { c: 1.0, beta: 0.0 }, 0.5);
        assert_eq!(s.target(1).measure, 1.0);
        assert!((s.target(4).measure - 0.25).abs() < 1e-15);
        assert!((s.target(4).radius - 0.125).abs() < 1e-15);
        let n = 100_000u64;
        let e = s.expected_hits_at(&[n])[0];
        assert!((e - ((n as f64).ln() + EULER_GAMMA)).abs() < 1e-4);
    }

    #[test]
    fn measure_harmonic_growth_rate() {
        for beta in [0.0, 0.5, 1.0] {
            let s = doubling_schedule(ScheduleKind::MeasureHarmonic { c: 1.0, beta }, 0.4);
            let ns = [10_000u64, 10_000_000];
            let e = s.expected_hits_at(&ns);
            let ratio = |i: usize| {
                let l = (ns[i] as f64).ln();
                e[i] / (l.powf(1.0 + beta) / (1.0 + beta))
            };
            assert!(
                (ratio(1) - 1.0).abs() < (ratio(0) - 1.0).abs(),
                "β = {beta}"
            );
            assert!((ratio(1) - 1.0).abs() < 0.06, "β = {beta}: {}", ratio(1));
        }
    }

    #[test]
    fn targets_are_nested() {
        let kinds = [
            ScheduleKind::RadiusPower { c: 0.25 },
            ScheduleKind::MeasureHarmonic { c: 2.0, beta: 1.5 },
        ];
        for kind in kinds {
            let s = doubling_schedule(kind, 0.7);
            let mut prev = f64::INFINITY;
            for j in 1..10_000 {
                let r = s.target(j).radius;
                assert!(r <= prev, "{kind:?} not nested at j = {j}");
                prev = r;
            }
        }
        let cat = TargetSchedule::build(
            ScheduleKind::RadiusPower { c: 0.5 },
            &SystemDescriptor::catmap(),
            Point::Torus(0.3, 0.7),
            1000,
        )
        .unwrap();
        assert!((cat.target(100).radius - 0.05).abs() < 1e-15);
    }

    #[test]
    fn kim_schedule_validation() {
        let lsv = SystemDescriptor::lsv(0.6).unwrap();
        let model = BallMeasureModel::intermittent_origin(0.6, 1.0);
        let make = |gamma: f64, p: f64| {
            TargetSchedule::with_model(
                ScheduleKind::KimNonBc { gamma },
                &lsv,
                Point::Line(p),
                model.clone(),
                1000,
            )
        };
        assert!(make(2.0, 0.0).is_ok());
        assert!(make(2.5, 0.0).is_ok());
        assert!(make(1.0, 0.0).is_err());
        assert!(make(2.6, 0.0).is_err());
        assert!(make(2.0, 0.3).is_err());
        assert!(TargetSchedule::with_model(
            ScheduleKind::KimNonBc { gamma: 2.0 },
            &SystemDescriptor::doubling(),
            Point::Line(0.0),
            model.clone(),
            1000
        )
        .is_err());
    }

    #[test]
    fn kim_lebesgue_sum_converges_while_measure_sum_diverges() {
        let lsv = SystemDescriptor::lsv(0.6).unwrap();
        let model = BallMeasureModel::intermittent_origin(0.6, 1.0);
        let s = TargetSchedule::with_model(
            ScheduleKind::KimNonBc { gamma: 2.0 },
            &lsv,
            Point::Line(0.0),
            model,
            10_000_000,
        )
        .unwrap();
        let ns = [100_000u64, 10_000_000];
        let e = s.expected_hits_at(&ns);
        let lebesgue: Vec<f64> = ns
            .iter()
            .map(|&n| (1..=n).map(|j| s.target(j).radius).sum())
            .collect();
        assert!(lebesgue[1] < std::f64::consts::PI.powi(2) / 6.0);
        assert!(lebesgue[1] - lebesgue[0] < 1e-4);
        // Σ j^{-0.8} grows like 5 n^{0.2}.
        assert!(e[1] > 2.0 * e[0], "{e:?}");
    }
}
