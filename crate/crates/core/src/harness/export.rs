use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::{mean_std, read_summary, read_trajectory};
use crate::error::{Error, Result};
use crate::record::{best_so_far, EvalRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Ordinal,
    /// Cumulative solver work units.
    Cost,
    /// Recorded wall-clock nanoseconds.
    Wall,
}

impl Axis {
    fn column(&self) -> &'static str {
        match self {
            Axis::Ordinal => "ordinal",
            Axis::Cost => "cost_units",
            Axis::Wall => "wall_ns",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinal" => Ok(Axis::Ordinal),
            "cost" | "cost_units" => Ok(Axis::Cost),
            "wall" | "wall_ns" => Ok(Axis::Wall),
            _ => Err(Error::Unknown {
                kind: "axis",
                name: s.to_string(),
            }),
        }
    }
}

/// Trajectory files of a run directory, in repetition order.
pub fn trajectory_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with("rep_") && name.ends_with(".jsonl")
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Loads all repetitions of the given run directories, rejecting runs on
/// different benchmarks.
pub fn load_runs(dirs: &[PathBuf]) -> Result<Vec<Vec<EvalRecord>>> {
    if dirs.is_empty() {
        return Err(Error::Invalid("no run directories given".into()));
    }
    let mut benchmark: Option<String> = None;
    let mut runs = Vec::new();
    for dir in dirs {
        let summary = read_summary(dir)?;
        match &benchmark {
            Some(b) if *b != summary.benchmark => {
                return Err(Error::Invalid(format!(
                    "mixed benchmarks: {b} and {}",
                    summary.benchmark
                )))
            }
            _ => benchmark = Some(summary.benchmark),
        }
        for f in trajectory_files(dir)? {
            runs.push(read_trajectory(&f)?);
        }
    }
    Ok(runs)
}

/// `(x, best-so-far)` steps of one run along an axis.
fn steps(run: &[EvalRecord], axis: Axis) -> Vec<(u64, f64)> {
    let best = best_so_far(run);
    let mut cost = 0u64;
    run.iter()
        .zip(best)
        .map(|(r, b)| {
            cost += r.cost_units;
            let x = match axis {
                Axis::Ordinal => r.ordinal,
                Axis::Cost => cost,
                Axis::Wall => r.wall_ns,
            };
            (x, b)
        })
        .collect()
}

/// CSV with columns `axis, best_so_far_mean, best_so_far_std, runs`. At each
/// x the statistics cover the runs that have at least one record at or
/// before x.
pub fn export_plotdata(runs: &[Vec<EvalRecord>], axis: Axis) -> Result<String> {
    if axis == Axis::Wall && runs.iter().flatten().all(|r| r.wall_ns == 0) {
        return Err(Error::Invalid("runs carry no wall-clock times".into()));
    }
    let per_run: Vec<Vec<(u64, f64)>> = runs.iter().map(|r| steps(r, axis)).collect();
    let mut xs: Vec<u64> = per_run.iter().flatten().map(|s| s.0).collect();
    xs.sort_unstable();
    xs.dedup();

    let mut out = format!("{},best_so_far_mean,best_so_far_std,runs\n", axis.column());
    let mut cursors = vec![0usize; per_run.len()];
    for x in xs {
        let mut vals = Vec::with_capacity(per_run.len());
        for (run, cur) in per_run.iter().zip(cursors.iter_mut()) {
            while *cur < run.len() && run[*cur].0 <= x {
                *cur += 1;
            }
            if *cur > 0 {
                vals.push(run[*cur - 1].1);
            }
        }
        let Some((mean, std)) = mean_std(&vals) else {
            continue;
        };
        writeln!(out, "{x},{mean},{std},{}", vals.len()).expect("writing to a String");
    }
    Ok(out)
}
