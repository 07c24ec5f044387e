//! CSV and JSON output of experiment and sweep results.
//!
//! CSV columns are fixed and reals are printed with 6 decimals; an absent
//! value is an empty field. JSON carries the full-precision result plus a
//! provenance block, the only place a timestamp appears.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentResult, SweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitFormat {
    Csv,
    Json,
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input: Option<PathBuf>,
    pub generated_at_unix: u64,
}

impl Provenance {
    pub fn now(input: Option<PathBuf>) -> Self {
        Provenance {
            tool: "grouprank".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input,
            generated_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub provenance: Provenance,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub provenance: Provenance,
    pub result: SweepResult,
}

fn real(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// One row per (realization, method, L).
pub fn write_realizations_csv<W: Write>(
    result: &ExperimentResult,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "realization,seed,method,L,recall")?;
    for rec in &result.realizations {
        for o in &rec.outcomes {
            for p in &o.recall {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    rec.index,
                    rec.seed,
                    o.method,
                    p.length,
                    real(p.recall)
                )?;
            }
        }
    }
    Ok(())
}

/// One row per (realization, method) with the AUC and iteration count.
pub fn write_auc_csv<W: Write>(result: &ExperimentResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "realization,seed,method,auc,iterations")?;
    for rec in &result.realizations {
        for o in &rec.outcomes {
            let iters = o.iterations.map(|i| i.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                rec.index,
                rec.seed,
                o.method,
                opt(o.auc),
                iters
            )?;
        }
    }
    Ok(())
}

/// One row per (method, L) with recall and AUC summaries.
pub fn write_aggregate_csv<W: Write>(result: &ExperimentResult, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "method,spam_type,d,k,q,p,L,realizations,recall_mean,recall_std,auc_mean,auc_std"
    )?;
    let s = &result.scenario;
    for agg in &result.aggregates {
        for r in &agg.recall {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                agg.method,
                result.config.spam_type,
                s.spammers,
                s.degree,
                real(s.ratio),
                real(s.activity),
                r.length,
                r.summary.count,
                real(r.summary.mean),
                real(r.summary.std),
                opt(agg.auc.map(|a| a.mean)),
                opt(agg.auc.map(|a| a.std)),
            )?;
        }
    }
    Ok(())
}

/// One row per (p, q, method).
pub fn write_grid_csv<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "p,q,d,k,method,recall_mean,recall_std,auc_mean,auc_std"
    )?;
    for cell in &result.cells {
        for agg in &cell.aggregates {
            let recall = agg
                .recall
                .iter()
                .find(|r| r.length == cell.scenario.spammers);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                real(cell.p),
                real(cell.q),
                cell.scenario.spammers,
                cell.scenario.degree,
                agg.method,
                opt(recall.map(|r| r.summary.mean)),
                opt(recall.map(|r| r.summary.std)),
                opt(agg.auc.map(|a| a.mean)),
                opt(agg.auc.map(|a| a.std)),
            )?;
        }
    }
    Ok(())
}

/// GR − CR mean recall per cell; header only when either method is missing.
pub fn write_difference_csv<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "p,q,delta_recall")?;
    if let Some(grid) = &result.recall_difference {
        for (qi, q) in grid.q_axis.iter().enumerate() {
            for (pi, p) in grid.p_axis.iter().enumerate() {
                writeln!(out, "{},{},{}", real(*p), real(*q), real(grid.get(pi, qi)))?;
            }
        }
    }
    Ok(())
}

fn write_file(
    dir: &Path,
    name: &str,
    fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut buf = Vec::new();
    fill(&mut buf).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the requested formats of a scenario result into `dir`; returns the files written.
pub fn emit_run(
    result: &ExperimentResult,
    formats: &[EmitFormat],
    dir: &Path,
    provenance: Provenance,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if formats.contains(&EmitFormat::Csv) {
        written.push(write_file(dir, "realizations.csv", |b| {
            write_realizations_csv(result, b)
        })?);
        written.push(write_file(dir, "auc.csv", |b| write_auc_csv(result, b))?);
        written.push(write_file(dir, "aggregate.csv", |b| {
            write_aggregate_csv(result, b)
        })?);
    }
    if formats.contains(&EmitFormat::Json) {
        let doc = RunDocument {
            provenance,
            result: result.clone(),
        };
        let text = serde_json::to_string_pretty(&doc)?;
        written.push(write_file(dir, "result.json", |b| {
            b.write_all(text.as_bytes())
        })?);
    }
    Ok(written)
}

/// Writes the requested formats of a sweep result into `dir`.
pub fn emit_sweep(
    result: &SweepResult,
    formats: &[EmitFormat],
    dir: &Path,
    provenance: Provenance,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if formats.contains(&EmitFormat::Csv) {
        written.push(write_file(dir, "grid.csv", |b| write_grid_csv(result, b))?);
        written.push(write_file(dir, "grid_delta.csv", |b| {
            write_difference_csv(result, b)
        })?);
    }
    if formats.contains(&EmitFormat::Json) {
        let doc = SweepDocument {
            provenance,
            result: result.clone(),
        };
        let text = serde_json::to_string_pretty(&doc)?;
        written.push(write_file(dir, "sweep.json", |b| {
            b.write_all(text.as_bytes())
        })?);
    }
    Ok(written)
}
