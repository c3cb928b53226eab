use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{OverheadRow, RankSummary};
use crate::bench::{MethodRuns, ScoreRow, Task};
use crate::engine::RunTrace;
use crate::error::{Error, Result};

/// Version of the CSV and JSON layouts written here.
pub const SCHEMA_VERSION: u32 = 1;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// `pwr3+mut` → `pwr3_mut`.
pub fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct TraceRow {
    seed: u64,
    generation: usize,
    best: f64,
    mean: f64,
    std: f64,
    wallclock_ms: f64,
}

pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let rows: Vec<TraceRow> = trace
        .per_generation
        .iter()
        .enumerate()
        .map(|(g, s)| TraceRow {
            seed: trace.seed,
            generation: g + 1,
            best: s.best,
            mean: s.mean,
            std: s.std,
            wallclock_ms: s.wallclock_ms,
        })
        .collect();
    write_csv(path, &rows)
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub task: String,
    pub method: String,
    pub n: usize,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub iqr: f64,
    /// Fraction of champions meeting every constraint; empty when unconstrained.
    pub feasibility: Option<f64>,
}

pub fn suite_table(task: Task, runs: &[MethodRuns]) -> Result<Vec<SuiteRow>> {
    runs.iter()
        .map(|r| {
            let s = r.summary()?;
            Ok(SuiteRow {
                task: task.name().into(),
                method: r.method.clone(),
                n: s.n,
                median: s.median,
                mean: s.mean,
                std: s.std,
                iqr: s.iqr,
                feasibility: r.run_set(task).feasibility(),
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct TimingRow {
    task: String,
    method: String,
    seed: u64,
    mean_wallclock_ms: f64,
}

pub fn timing_rows(task: Task, runs: &[MethodRuns]) -> Vec<TimingRow> {
    runs.iter()
        .flat_map(|r| {
            r.traces.iter().map(move |t| TimingRow {
                task: task.name().into(),
                method: r.method.clone(),
                seed: t.seed,
                mean_wallclock_ms: t.mean_wallclock_ms(),
            })
        })
        .collect()
}

pub fn print_table(table: &[SuiteRow], overhead: &[OverheadRow]) {
    println!(
        "  {:<10} {:>12} {:>12} {:>12} {:>12} {:>8} {:>9}",
        "method", "median", "mean", "std", "iqr", "feasible", "time x"
    );
    for (row, o) in table.iter().zip(overhead) {
        let feas = row
            .feasibility
            .map(|f| format!("{:.0}%", 100.0 * f))
            .unwrap_or_else(|| "-".into());
        println!(
            "  {:<10} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>8} {:>9.3}",
            row.method, row.median, row.mean, row.std, row.iqr, feas, o.ratio
        );
    }
}

#[derive(Serialize, Deserialize)]
pub struct RankFile {
    pub schema_version: u32,
    pub blocks: Vec<String>,
    #[serde(flatten)]
    pub ranks: RankSummary,
}

impl RankFile {
    pub fn new(ranks: &RankSummary, blocks: &[String]) -> Self {
        RankFile {
            schema_version: SCHEMA_VERSION,
            blocks: blocks.to_vec(),
            ranks: ranks.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CdRow {
    method: String,
    mean_rank: f64,
    cd: f64,
}

pub fn cd_rows(ranks: &RankSummary) -> Vec<CdRow> {
    ranks
        .methods
        .iter()
        .zip(&ranks.mean_ranks)
        .map(|(m, &r)| CdRow {
            method: m.clone(),
            mean_rank: r,
            cd: ranks.nemenyi_cd,
        })
        .collect()
}
