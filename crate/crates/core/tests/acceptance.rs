//! Ensemble acceptance experiments. Each test prints one PASS/FAIL line to
//! stderr (uncaptured), then asserts.
//!
//! Every ensemble uses the same master seed, chosen once and never tuned.

use std::io::Write;
use std::sync::OnceLock;

use birkhoff_lab::accumulate::{
    checkpoint_times, default_checkpoint_ratio, escape_time, estimate_exponent_series,
    mn_fluctuation, CheckpointRecord, RunResult, RunStatus,
};
use birkhoff_lab::dynamics::{catmap_inverse, catmap_step, BitReservoir, TorusPoint};
use birkhoff_lab::expcli::{run_ensemble, write_csv, ExperimentConfig};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 2024;
const N_MAX: u64 = 10_000_000;
const GOLDEN: &str = "0.6180339887498949";

fn line(id: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{verdict}] {id}: {detail}");
}

fn config(body: &str, ensemble_size: usize) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        "{body}\nn_max = {N_MAX}\nensemble_size = {ensemble_size}\nmaster_seed = {MASTER_SEED}\n"
    ))
    .expect("valid acceptance config")
}

fn ensemble(body: &str, size: usize) -> Vec<RunResult> {
    let runs = run_ensemble(&config(body, size), None).expect("ensemble runs");
    assert!(runs.iter().all(|r| r.status == RunStatus::Completed));
    runs
}

macro_rules! shared_run {
    ($name:ident, $body:expr, $size:expr) => {
        fn $name() -> &'static [RunResult] {
            static CELL: OnceLock<Vec<RunResult>> = OnceLock::new();
            CELL.get_or_init(|| ensemble($body, $size))
        }
    };
}

shared_run!(
    doubling_k2,
    &format!("system = doubling\np = {GOLDEN}\nk = 2\nschedule = radius_power\nschedule_c = 0.25"),
    32
);
shared_run!(lsv_origin, "system = lsv\nalpha = 0.5\np = 0\nk = 1", 64);
shared_run!(lsv_generic, "system = lsv\nalpha = 0.5\np = 0.3\nk = 1", 32);
shared_run!(logistic_origin, "system = logistic\np = 0\nk = 2", 32);
shared_run!(logistic_generic, "system = logistic\np = 0.3\nk = 2", 32);
shared_run!(catmap_k4, "system = catmap\np = 0.3,0.7\nk = 4", 32);
shared_run!(
    lsv_kim,
    "system = lsv\nalpha = 0.6\np = 0\nk = 1\nschedule = kim\nschedule_gamma = 2",
    32
);
shared_run!(
    doubling_k1,
    &format!("system = doubling\np = {GOLDEN}\nk = 1"),
    32
);

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn median_slope(runs: &[RunResult]) -> f64 {
    median(
        runs.iter()
            .map(|r| r.exponent_estimate.expect("slope"))
            .collect(),
    )
}

fn fraction(runs: &[RunResult], pred: impl Fn(&RunResult) -> bool) -> f64 {
    runs.iter().filter(|r| pred(r)).count() as f64 / runs.len() as f64
}

fn at(run: &RunResult, n: u64) -> &CheckpointRecord {
    run.checkpoints
        .iter()
        .find(|c| c.n == n)
        .unwrap_or_else(|| panic!("no checkpoint at n = {n}"))
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

#[test]
fn a01_generic_exponent_doubling() {
    let m = median_slope(doubling_k2());
    let pass = within(m, 2.0, 0.2);
    line(
        "A1",
        pass,
        format!("doubling k=2: median slope {m:.4}, target 2.0 ± 0.2"),
    );
    assert!(pass);
}

#[test]
fn a02_indifferent_fixed_point() {
    let m = median(lsv_origin().iter().map(|r| r.exponent_pointwise).collect());
    let pass = within(m, 1.5, 0.25);
    line(
        "A2",
        pass,
        format!("lsv α=0.5 p=0 k=1: median log S_n/log n {m:.4}, target 1.5 ± 0.25"),
    );
    assert!(pass);
}

#[test]
fn a03_lsv_away_from_fixed_point() {
    let m = median_slope(lsv_generic());
    let pass = within(m, 1.0, 0.2);
    line(
        "A3",
        pass,
        format!("lsv α=0.5 p=0.3 k=1: median slope {m:.4}, target 1.0 ± 0.2"),
    );
    assert!(pass);
}

#[test]
fn a04_singular_density_logistic() {
    let m0 = median_slope(logistic_origin());
    let m3 = median_slope(logistic_generic());
    let pass = within(m0, 4.0, 0.5) && within(m3, 2.0, 0.3);
    line(
        "A4",
        pass,
        format!("logistic k=2: p=0 median slope {m0:.4} (4.0 ± 0.5), p=0.3 median slope {m3:.4} (2.0 ± 0.3)"),
    );
    assert!(pass);
}

#[test]
fn a05_two_dimensional_catmap() {
    let m = median_slope(catmap_k4());
    let pass = within(m, 2.0, 0.3);
    line(
        "A5",
        pass,
        format!("catmap k=4: median slope {m:.4}, target 2.0 ± 0.3"),
    );
    assert!(pass);
}

#[test]
fn a06_sbc_law() {
    let runs = doubling_k2();
    let f = fraction(runs, |r| {
        let ratio = r.checkpoints.last().unwrap().sbc_ratio();
        (0.85..=1.15).contains(&ratio)
    });
    let e_n = runs[0].checkpoints.last().unwrap().e_n;
    let pass = f >= 0.9;
    line(
        "A6",
        pass,
        format!("doubling r_j=1/(4j): hits/E_n in [0.85, 1.15] for {:.1}% of orbits (need ≥ 90%), E_n = {e_n:.3}", f * 100.0),
    );
    assert!(pass);
}

#[test]
fn a07_qsbc_residual() {
    let f = fraction(doubling_k2(), |r| {
        r.checkpoints
            .iter()
            .filter(|c| c.n >= 10_000)
            .map(|c| (c.hits as f64 - c.e_n).abs() / c.e_n.powf(0.75))
            .fold(0.0, f64::max)
            <= 5.0
    });
    let pass = f >= 0.9;
    line(
        "A7",
        pass,
        format!(
            "max |hits − E_n|/E_n^0.75 ≤ 5 for {:.1}% of orbits (need ≥ 90%)",
            f * 100.0
        ),
    );
    assert!(pass);
}

#[test]
fn a08_kim_non_borel_cantelli() {
    let runs = lsv_kim();
    let plateau = fraction(runs, |r| at(r, 100_000).hits == at(r, N_MAX).hits);
    let growth = at(&runs[0], N_MAX).e_n / at(&runs[0], 100_000).e_n;
    let pass = plateau >= 0.9 && growth >= 2.0;
    line(
        "A8",
        pass,
        format!("lsv α=0.6 γ=2: hits(1e5) = hits(1e7) for {:.1}% of orbits (need ≥ 90%), E(1e7)/E(1e5) = {growth:.3} (need ≥ 2)", plateau * 100.0),
    );
    assert!(pass);
}

#[test]
fn a09_escape_time_scaling() {
    let ms: [f64; 4] = [1e2, 1e3, 1e4, 1e5];
    let pts: Vec<(f64, f64)> = ms
        .iter()
        .map(|&m| {
            (
                m.ln(),
                (escape_time(0.5, m, 1.0, 0.25).unwrap() as f64).ln(),
            )
        })
        .collect();
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / 4.0,
        pts.iter().map(|p| p.1).sum::<f64>() / 4.0,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let pass = within(slope, 0.5, 0.15);
    line(
        "A9",
        pass,
        format!("escape time α=0.5 γ=1: log-log slope {slope:.4}, target 0.5 ± 0.15"),
    );
    assert!(pass);
}

#[test]
fn a10_aaronson_diagnostic() {
    let sets: [(&str, &[RunResult]); 6] = [
        ("A1", doubling_k2()),
        ("A2", lsv_origin()),
        ("A3", lsv_generic()),
        ("A4 p=0", logistic_origin()),
        ("A4 p=0.3", logistic_generic()),
        ("A5", catmap_k4()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, runs) in sets {
        let f = fraction(runs, |r| {
            at(r, N_MAX).aaronson_ratio < 0.5 * at(r, 10_000).aaronson_ratio
        });
        pass &= f >= 0.9;
        parts.push(format!("{name} {:.1}%", f * 100.0));
    }
    line(
        "A10",
        pass,
        format!(
            "a(S_n)/n at 1e7 < half its value at 1e4 (need ≥ 90% in every run): {}",
            parts.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn a11_maxima_fluctuation() {
    let f = fraction(doubling_k1(), |r| {
        mn_fluctuation(&r.checkpoints, 1.0).unwrap() > 10.0
    });
    let pass = f >= 0.5;
    line(
        "A11",
        pass,
        format!(
            "doubling k=1: M_n/n fluctuation ratio > 10 for {:.1}% of orbits (need ≥ 50%)",
            f * 100.0
        ),
    );
    assert!(pass);
}

/// Exact checks: bit reservoir against big-integer dyadic arithmetic, cat map
/// inversion, the estimator on `n²`, and CSV bytes across worker counts.
#[test]
fn a12_exactness_suite() {
    let mut failures = Vec::new();

    // 192-bit dyadic rationals N / 2^192 under doubling and tent.
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    let one = BigUint::from(1u8) << 192usize;
    let mut reservoir_ok = true;
    for trial in 0..200 {
        let words: [u64; 3] = rng.gen();
        let mut n = words
            .iter()
            .fold(BigUint::from(0u8), |acc, &w| (acc << 64usize) + w);
        let tent = trial % 2 == 1;
        let mut bits = BitReservoir::from_words(&words);
        for _ in 0..60 {
            let twice = &n << 1usize;
            n = if !tent {
                twice % &one
            } else if twice <= one {
                twice
            } else {
                (&one << 1usize) - twice
            };
            if tent {
                bits.tent_step()
            } else {
                bits.doubling_step()
            }
            // A complemented reservoir stores the expansion ending in ones,
            // whose first 192 digits spell N − 1.
            let digits = if bits.is_complemented() {
                &n - 1u8
            } else {
                n.clone()
            };
            let expected = digits >> 128usize;
            if BigUint::from(bits.head()) != expected {
                reservoir_ok = false;
            }
        }
    }
    if !reservoir_ok {
        failures.push("bit reservoir");
    }

    let mut cat_ok = true;
    for _ in 0..10_000 {
        let p = TorusPoint {
            x: rng.gen(),
            y: rng.gen(),
        };
        let image = catmap_step(p);
        let (x, y) = (u128::from(p.x), u128::from(p.y));
        let oracle = TorusPoint {
            x: (2 * x + y) as u64,
            y: (x + y) as u64,
        };
        cat_ok &=
            image == oracle && catmap_inverse(image) == p && catmap_step(catmap_inverse(p)) == p;
    }
    if !cat_ok {
        failures.push("catmap inverse");
    }

    let series: Vec<(u64, f64)> = checkpoint_times(N_MAX, default_checkpoint_ratio())
        .into_iter()
        .filter(|&n| n >= 1000)
        .map(|n| (n, (n as f64).powi(2)))
        .collect();
    let slope = estimate_exponent_series(&series).unwrap().slope;
    if (slope - 2.0).abs() >= 1e-9 {
        failures.push("estimator");
    }

    let cfg = ExperimentConfig::parse(
        "system = tent\np = 0.2\nk = 1.5\nn_max = 100000\nensemble_size = 6\nmaster_seed = 2024\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for workers in [1, 4] {
        let path = dir.path().join(format!("w{workers}.csv"));
        write_csv(&path, &run_ensemble(&cfg, Some(workers)).unwrap()).unwrap();
        bytes.push(std::fs::read(&path).unwrap());
    }
    if bytes[0] != bytes[1] {
        failures.push("csv determinism");
    }

    let pass = failures.is_empty();
    line(
        "A12",
        pass,
        format!(
            "reservoir 60-step dyadic, catmap inverse on 1e4 points, n² slope error {:.1e}, CSV across 1/4 workers; failing: {:?}",
            (slope - 2.0).abs(),
            failures
        ),
    );
    assert!(pass);
}
