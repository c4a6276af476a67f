use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::accumulate::{escape_time, RunResult, DEFAULT_EPSILON0};
use crate::dynamics::{Point, SystemDescriptor, SystemId};
use crate::error::{AccumulateError, DynamicsError};
use crate::measure::{least_squares_slope, predicted_exponent};

use super::config::{ConfigError, ExperimentConfig, RawConfig};
use super::ensemble::{run_ensemble, worker_count};
use super::output::{write_csv, write_sbc_csv, write_summary};
use super::summary::{orbit_exponent, quantile, summarize, EnsembleSummary};

/// Orbits that overflow beyond this fraction of the ensemble fail the run.
const MAX_OVERFLOW_FRACTION: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(
    name = "birkhoff-lab",
    version,
    about = "Birkhoff sums of singular observables and shrinking-target statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the config-driven subcommands. Each one overrides the
/// corresponding config key.
#[derive(Debug, clap::Args)]
pub struct ConfigArgs {
    /// Flat `key = value` experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override any config key, e.g. `--set k=3`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Output CSV path (`output_csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary path (`output_summary`).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an ensemble and write the checkpoint CSV and summary.
    Run(ConfigArgs),
    /// Print the predicted growth exponent of `S_n`.
    Predict {
        system: SystemId,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// `x`, or `x,y` on the torus.
        #[arg(long, allow_hyphen_values = true)]
        p: Point,
        #[arg(long)]
        k: f64,
    },
    /// Run an ensemble and write only the hit-count series.
    Sbc(ConfigArgs),
    /// Tabulate LSV escape times from `[0, ε₀]` and fit their growth in `m`.
    Escape {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        gammas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
        ms: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_EPSILON0)]
        epsilon0: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured ensemble once per `k` and tabulate the exponents.
    Sweep {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<f64>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid input: {0}")]
    Input(#[from] DynamicsError),
    #[error("run failed: {0}")]
    Run(#[from] AccumulateError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{overflowed} of {orbits} orbits overflowed (limit {:.0}%)", MAX_OVERFLOW_FRACTION * 100.0)]
    Overflow { overflowed: usize, orbits: usize },
}

impl CliError {
    /// 2 for configuration and input errors, 3 for excessive overflow, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Run(AccumulateError::Dynamics(_) | AccumulateError::Measure(_)) => 2,
            CliError::Run(AccumulateError::InvalidParameter(_)) => 2,
            CliError::Overflow { .. } => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

impl ConfigArgs {
    fn load(&self) -> Result<RawConfig, CliError> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", self.config.display()),
        })?;
        let mut raw = RawConfig::parse(&text)?;
        for o in &self.overrides {
            raw.set_override(o)?;
        }
        let mut set = |key: &str, v: Option<String>| match v {
            Some(v) => raw.insert(key, &v, None),
            None => Ok(()),
        };
        set("n_max", self.n_max.map(|v| v.to_string()))?;
        set("ensemble_size", self.ensemble_size.map(|v| v.to_string()))?;
        set("master_seed", self.master_seed.map(|v| v.to_string()))?;
        set(
            "output_csv",
            self.out.as_ref().map(|v| v.display().to_string()),
        )?;
        set(
            "output_summary",
            self.summary.as_ref().map(|v| v.display().to_string()),
        )?;
        Ok(raw)
    }
}

fn check_overflow(summary: &EnsembleSummary) -> Result<(), CliError> {
    if summary.overflow_fraction() > MAX_OVERFLOW_FRACTION {
        return Err(CliError::Overflow {
            overflowed: summary.overflowed.len(),
            orbits: summary.orbits,
        });
    }
    Ok(())
}

fn report(
    out: &mut impl Write,
    cfg: &ExperimentConfig,
    summary: &EnsembleSummary,
) -> io::Result<()> {
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    writeln!(
        out,
        "{} orbits ({} completed, {} overflowed), n_max = {}",
        summary.orbits,
        summary.completed,
        summary.overflowed.len(),
        cfg.n_max
    )?;
    writeln!(
        out,
        "predicted exponent {}, median {:?} exponent {} (tolerance {}): {}",
        fmt(summary.predicted_exponent),
        cfg.exponent_metric,
        fmt(summary.median_exponent),
        cfg.tolerance,
        match summary.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "n/a",
        }
    )?;
    if let Some(q) = &summary.sbc_ratio_quantiles {
        writeln!(
            out,
            "hits/E_n at n_max: median {:.4}, IQR [{:.4}, {:.4}]",
            q.q50, q.q25, q.q75
        )?;
    }
    Ok(())
}

fn run_configured(
    raw: &RawConfig,
) -> Result<(ExperimentConfig, Vec<RunResult>, EnsembleSummary), CliError> {
    let cfg = raw.build()?;
    let runs = run_ensemble(&cfg, worker_count())?;
    let summary = summarize(&cfg, &runs);
    Ok((cfg, runs, summary))
}

fn write_table(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

/// Runs one parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Run(args) => {
            let (cfg, runs, summary) = run_configured(&args.load()?)?;
            write_csv(&cfg.output_csv, &runs)?;
            write_summary(&cfg.output_summary, &cfg, &summary)?;
            report(&mut stdout, &cfg, &summary)?;
            check_overflow(&summary)
        }
        Command::Predict {
            system,
            alpha,
            p,
            k,
        } => {
            let system = SystemDescriptor::new(system, alpha)?;
            let pred = predicted_exponent(&system, &p, k)?;
            for w in &pred.warnings {
                log::warn!("{w}");
            }
            writeln!(stdout, "{pred}")?;
            Ok(())
        }
        Command::Sbc(args) => {
            let (cfg, runs, summary) = run_configured(&args.load()?)?;
            write_sbc_csv(&cfg.output_csv, &runs)?;
            for (i, r) in runs.iter().enumerate() {
                let last = r.checkpoints.last().expect("non-empty");
                writeln!(
                    stdout,
                    "orbit {i}: n = {}, hits = {}, E_n = {:.4}, hits/E_n = {:.4}",
                    last.n,
                    last.hits,
                    last.e_n,
                    last.sbc_ratio()
                )?;
            }
            check_overflow(&summary)
        }
        Command::Escape {
            alpha,
            gammas,
            ms,
            epsilon0,
            out,
        } => {
            let mut text = String::from("m,gamma,escape_time,slope\n");
            for &gamma in &gammas {
                let times = ms
                    .iter()
                    .map(|&m| escape_time(alpha, m, gamma, epsilon0))
                    .collect::<Result<Vec<u64>, _>>()?;
                let pts: Vec<(f64, f64)> = ms
                    .iter()
                    .zip(&times)
                    .filter(|(_, &t)| t > 0)
                    .map(|(m, &t)| (m.ln(), (t as f64).ln()))
                    .collect();
                let slope = if pts.len() >= 2 {
                    least_squares_slope(&pts)
                } else {
                    f64::NAN
                };
                for (m, t) in ms.iter().zip(&times) {
                    text.push_str(&format!("{m},{gamma},{t},{slope:.6}\n"));
                }
            }
            write_table(out.as_ref(), &text)?;
            Ok(())
        }
        Command::Sweep { args, ks, table } => {
            let base = args.load()?;
            let mut text = String::from(
                "k,predicted_exponent,median_exponent,q25,q75,tolerance,pass,overflowed\n",
            );
            let mut worst: Option<CliError> = None;
            for &k in &ks {
                let mut raw = base.clone();
                raw.set_override(&format!("k={k}"))?;
                let (cfg, runs, summary) = run_configured(&raw)?;
                let exps: Vec<f64> = {
                    let mut v: Vec<f64> = runs
                        .iter()
                        .filter(|r| r.status == crate::accumulate::RunStatus::Completed)
                        .filter_map(|r| orbit_exponent(r, cfg.exponent_metric))
                        .filter(|x| x.is_finite())
                        .collect();
                    v.sort_by(f64::total_cmp);
                    v
                };
                let (q25, q75) = if exps.is_empty() {
                    (f64::NAN, f64::NAN)
                } else {
                    (quantile(&exps, 0.25), quantile(&exps, 0.75))
                };
                let opt = |v: Option<f64>| v.map_or("NaN".to_string(), |x| format!("{x:.16e}"));
                text.push_str(&format!(
                    "{k},{},{},{q25:.16e},{q75:.16e},{},{},{}\n",
                    opt(summary.predicted_exponent),
                    opt(summary.median_exponent),
                    cfg.tolerance,
                    summary
                        .pass
                        .map_or("n/a", |p| if p { "true" } else { "false" }),
                    summary.overflowed.len()
                ));
                if let Err(e) = check_overflow(&summary) {
                    worst = Some(e);
                }
            }
            write_table(table.as_ref(), &text)?;
            worst.map_or(Ok(()), Err)
        }
    }
}
