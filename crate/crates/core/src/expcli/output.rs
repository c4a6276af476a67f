use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::json;

use crate::accumulate::{trimmed_sum, RunResult};

use super::config::ExperimentConfig;
use super::summary::EnsembleSummary;

pub const CSV_COLUMNS: [&str; 13] = [
    "run_id",
    "seed",
    "n",
    "S_n",
    "log_Sn_over_log_n",
    "M_n",
    "hits",
    "E_n",
    "sbc_ratio",
    "qsbc_residual",
    "trimmed_b8",
    "aaronson_ratio",
    "last_hit_index",
];

pub const SBC_COLUMNS: [&str; 8] = [
    "run_id",
    "seed",
    "n",
    "hits",
    "E_n",
    "sbc_ratio",
    "qsbc_residual",
    "last_hit_index",
];

/// Number of largest terms removed in the `trimmed_b8` column.
pub const TRIM_B: usize = 8;

/// 17 significant digits, enough for an exact `f64` round trip.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// One row per (orbit, checkpoint), in orbit-index order.
pub fn write_csv(path: &Path, runs: &[RunResult]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(CSV_COLUMNS).map_err(to_io)?;
    for (run_id, run) in runs.iter().enumerate() {
        for c in &run.checkpoints {
            let trimmed = trimmed_sum(c, TRIM_B.min(c.top_terms.len())).unwrap_or(f64::NAN);
            w.write_record([
                run_id.to_string(),
                run.seed.to_string(),
                c.n.to_string(),
                real(c.s_n),
                real(c.log_ratio()),
                real(c.m_n),
                c.hits.to_string(),
                real(c.e_n),
                real(c.sbc_ratio()),
                real(c.qsbc_residual(run.params.delta)),
                real(trimmed),
                real(c.aaronson_ratio),
                c.last_hit_index.to_string(),
            ])
            .map_err(to_io)?;
        }
    }
    w.flush()
}

/// Hit-count series only.
pub fn write_sbc_csv(path: &Path, runs: &[RunResult]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(SBC_COLUMNS).map_err(to_io)?;
    for (run_id, run) in runs.iter().enumerate() {
        for c in &run.checkpoints {
            w.write_record([
                run_id.to_string(),
                run.seed.to_string(),
                c.n.to_string(),
                c.hits.to_string(),
                real(c.e_n),
                real(c.sbc_ratio()),
                real(c.qsbc_residual(run.params.delta)),
                c.last_hit_index.to_string(),
            ])
            .map_err(to_io)?;
        }
    }
    w.flush()
}

/// JSON object with the summary and an echo of the configuration, both as
/// structured fields and as re-parsable `key = value` text.
pub fn write_summary(
    path: &Path,
    cfg: &ExperimentConfig,
    summary: &EnsembleSummary,
) -> io::Result<()> {
    let doc = json!({
        "config": cfg,
        "config_text": cfg.to_text(),
        "summary": summary,
    });
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}
