//! Multi-run summaries, Friedman/Nemenyi rank statistics and runtime overhead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Direction;

/// Two-tailed Nemenyi critical values `q_{0.05}` for k = 2..=10 methods.
const NEMENYI_Q05: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];

pub fn nemenyi_q05(k: usize) -> Option<f64> {
    k.checked_sub(2).and_then(|i| NEMENYI_Q05.get(i)).copied()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 divisor).
    pub std: f64,
    /// Q3 − Q1 with linearly interpolated quartiles.
    pub iqr: f64,
}

/// Median, mean, sample std and IQR of at least two values.
pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 runs, got {}",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Summary {
        n,
        median: quantile_sorted(&sorted, 0.5),
        mean,
        std: var.sqrt(),
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
    })
}

/// Linear-interpolation quantile on sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, 0.5)
}

/// Champion scores and timings of one method on one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSet {
    pub task: String,
    pub method: String,
    pub champions: Vec<f64>,
    /// Mean per-generation wall-clock of each run, in milliseconds.
    pub wallclock_ms: Vec<f64>,
    /// Champion constraint status per run, when the task has constraints.
    #[serde(default)]
    pub feasible: Vec<bool>,
}

impl RunSet {
    pub fn summarize(&self) -> Result<Summary> {
        summarize(&self.champions)
    }

    pub fn feasibility(&self) -> Option<f64> {
        if self.feasible.is_empty() {
            None
        } else {
            Some(self.feasible.iter().filter(|&&f| f).count() as f64 / self.feasible.len() as f64)
        }
    }
}

/// Blocks (tasks) by treatments (methods); `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub tasks: Vec<String>,
    pub methods: Vec<String>,
    pub directions: Vec<Direction>,
    pub scores: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub methods: Vec<String>,
    pub mean_ranks: Vec<f64>,
    pub friedman_statistic: f64,
    pub nemenyi_cd: f64,
    pub n_tasks: usize,
}

/// Ranks with 1 = best; tied values share their average rank.
pub fn rank_scores(scores: &[f64], direction: Direction) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| direction.cmp_best(scores[a], scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman χ²_F over per-task ranks and the Nemenyi critical difference at α = 0.05.
pub fn friedman_nemenyi(matrix: &ScoreMatrix) -> Result<RankSummary> {
    let k = matrix.methods.len();
    let n = matrix.tasks.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 methods, got {k}")));
    }
    if n < 1 {
        return Err(Error::InsufficientData("need at least 1 task".into()));
    }
    if matrix.scores.len() != n || matrix.directions.len() != n {
        return Err(Error::arity("score rows and directions must match the task list"));
    }
    let mut missing = Vec::new();
    for (t, row) in matrix.scores.iter().enumerate() {
        for (m, method) in matrix.methods.iter().enumerate() {
            if row.get(m).copied().flatten().is_none_or(|v| !v.is_finite()) {
                missing.push(format!("{}/{}", matrix.tasks[t], method));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteDesign(missing));
    }

    let mut rank_sums = vec![0.0; k];
    for (row, &dir) in matrix.scores.iter().zip(&matrix.directions) {
        let values: Vec<f64> = row.iter().map(|v| v.expect("checked")).collect();
        for (s, r) in rank_sums.iter_mut().zip(rank_scores(&values, dir)) {
            *s += r;
        }
    }
    let nf = n as f64;
    let kf = k as f64;
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let friedman = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    let q = nemenyi_q05(k).ok_or(Error::UnsupportedSize { got: k, max: 10 })?;
    let cd = q * (kf * (kf + 1.0) / (6.0 * nf)).sqrt();
    Ok(RankSummary {
        methods: matrix.methods.clone(),
        mean_ranks,
        // Rounding can leave −1e-15 for fully tied designs.
        friedman_statistic: friedman.max(0.0),
        nemenyi_cd: cd,
        n_tasks: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub task: String,
    pub method: String,
    pub median_wallclock_ms: f64,
    /// Median per-generation time relative to the baseline method on the same task.
    pub ratio: f64,
}

/// Per-generation cost of each method relative to `baseline` on the same task.
pub fn overhead_report(runsets: &[RunSet], baseline: &str) -> Result<Vec<OverheadRow>> {
    let mut rows = Vec::new();
    for rs in runsets {
        let base = runsets
            .iter()
            .find(|b| b.task == rs.task && b.method == baseline)
            .ok_or_else(|| {
                Error::config(format!("baseline `{baseline}` missing for task `{}`", rs.task))
            })?;
        if rs.wallclock_ms.is_empty() || base.wallclock_ms.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no timing data for {}/{}",
                rs.task, rs.method
            )));
        }
        let base_median = median(&base.wallclock_ms).max(f64::MIN_POSITIVE);
        let own = median(&rs.wallclock_ms).max(f64::MIN_POSITIVE);
        rows.push(OverheadRow {
            task: rs.task.clone(),
            method: rs.method.clone(),
            median_wallclock_ms: own,
            ratio: own / base_median,
        });
    }
    Ok(rows)
}
