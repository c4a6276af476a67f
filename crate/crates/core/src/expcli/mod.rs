//! Experiment configuration, ensemble orchestration and durable output.

mod commands;
mod config;
mod ensemble;
mod output;
mod summary;

pub use commands::{execute, Cli, CliError, Command};
pub use config::{
    ConfigError, ExperimentConfig, ExponentMetric, RawConfig, DEFAULT_ENSEMBLE_SIZE,
    DEFAULT_TOLERANCE, KEYS,
};
pub use ensemble::{orbit_seed, run_ensemble, worker_count, WORKERS_ENV};
pub use output::{write_csv, write_sbc_csv, write_summary, CSV_COLUMNS, SBC_COLUMNS, TRIM_B};
pub use summary::{
    quantile, summarize, CheckpointStats, EnsembleSummary, OverflowRecord, Quantiles,
};
