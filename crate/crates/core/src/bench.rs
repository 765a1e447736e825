//! Dual-budget benchmark runs and their per-configuration tables.

use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derived::DerivedTables;
use crate::instance::Instance;
use crate::solution::Status;
use crate::solver::{solve, SolveParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub short: Duration,
    pub long: Duration,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            short: Duration::from_secs(600),
            long: Duration::from_secs(3600),
        }
    }
}

/// One labelled instance of a corpus.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub config: String,
    pub replicate: usize,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub objective: Option<i64>,
    pub lower_bound: Option<i64>,
    pub gap_percent: Option<f64>,
    pub status: Status,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl RunOutcome {
    fn failed(message: String) -> Self {
        Self {
            objective: None,
            lower_bound: None,
            gap_percent: None,
            status: Status::Unknown,
            wall_time: 0.0,
            error: Some(message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRun {
    pub config: String,
    pub replicate: usize,
    pub short: RunOutcome,
    pub long: RunOutcome,
}

impl InstanceRun {
    /// RPD of the short run against the long run, when both found a solution.
    pub fn rpd_percent(&self) -> Option<f64> {
        Some(rpd(self.short.objective?, self.long.objective?))
    }
}

/// Table row for one configuration. Objective, time and gap describe the
/// long-budget runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub config: String,
    pub replicates: usize,
    pub mean_objective: Option<f64>,
    pub mean_wall_time: f64,
    pub gap_percent: Option<f64>,
    pub optimal_count: usize,
    pub infeasible_count: usize,
    pub rpd_percent: Option<f64>,
}

/// `(short - long) · 100 / long`.
pub fn rpd(short: i64, long: i64) -> f64 {
    (short - long) as f64 * 100.0 / long as f64
}

fn run_once(instance: &Instance, limit: Duration, workers: usize, seed: u64) -> RunOutcome {
    let derived = match DerivedTables::build(instance) {
        Ok(d) => d,
        Err(e) => return RunOutcome::failed(e.to_string()),
    };
    let params = SolveParams {
        time_limit: limit,
        workers,
        seed,
    };
    match solve(instance, &derived, &params) {
        Ok((report, _)) => RunOutcome {
            objective: report.best_objective,
            lower_bound: Some(report.lower_bound),
            gap_percent: report.gap_percent,
            status: report.status,
            wall_time: report.wall_time,
            error: None,
        },
        Err(e) => RunOutcome::failed(e.to_string()),
    }
}

/// Solves every instance once per budget. Failures are recorded, not raised.
/// Results come back in corpus order.
pub fn run_bench(
    corpus: &[BenchInstance],
    budgets: Budgets,
    workers: usize,
    seed: u64,
) -> Vec<InstanceRun> {
    corpus
        .par_iter()
        .map(|b| InstanceRun {
            config: b.config.clone(),
            replicate: b.replicate,
            short: run_once(&b.instance, budgets.short, workers, seed),
            long: run_once(&b.instance, budgets.long, workers, seed),
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Per-configuration rows sorted by configuration id.
pub fn aggregate(runs: &[InstanceRun]) -> Vec<BenchRow> {
    let mut groups: BTreeMap<&str, Vec<&InstanceRun>> = BTreeMap::new();
    for r in runs {
        groups.entry(&r.config).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(config, rs)| BenchRow {
            config: config.to_string(),
            replicates: rs.len(),
            mean_objective: mean(rs.iter().filter_map(|r| r.long.objective).map(|o| o as f64)),
            mean_wall_time: mean(rs.iter().map(|r| r.long.wall_time)).unwrap_or(0.0),
            gap_percent: mean(rs.iter().filter_map(|r| r.long.gap_percent)),
            optimal_count: rs
                .iter()
                .filter(|r| r.long.status == Status::Optimal)
                .count(),
            infeasible_count: rs.iter().filter(|r| r.long.objective.is_none()).count(),
            rpd_percent: mean(rs.iter().filter_map(|r| r.rpd_percent())),
        })
        .collect()
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

pub const COLUMNS: [&str; 8] = [
    "Config", "Reps", "Obj.", "CPU", "GAP%", "RPD%", "Opt", "Infeas",
];

fn cells(r: &BenchRow) -> [String; 8] {
    [
        r.config.clone(),
        r.replicates.to_string(),
        fmt_opt(r.mean_objective, 1),
        format!("{:.2}", r.mean_wall_time),
        fmt_opt(r.gap_percent, 2),
        fmt_opt(r.rpd_percent, 2),
        r.optimal_count.to_string(),
        r.infeasible_count.to_string(),
    ]
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory csv");
    for r in rows {
        w.write_record(cells(r)).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// Right-aligned plain-text table.
pub fn to_text(rows: &[BenchRow]) -> String {
    let body: Vec<[String; 8]> = rows.iter().map(cells).collect();
    let mut width: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for row in &body {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .enumerate()
            .map(|(idx, (c, &w))| {
                if idx == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let header: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
    let mut out = line(&header);
    out.push('\n');
    out.push_str(&"-".repeat(out.len() - 1));
    out.push('\n');
    for row in &body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
