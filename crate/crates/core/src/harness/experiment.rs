use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{
    adaptive_lasso_cv, lasso_cv, multi_start_sparse_ho, sparse_ho_budgeted, GridSpec, SparseHoConfig,
    DEFAULT_EPS, DEFAULT_GRID_POINTS, DEFAULT_N_REWEIGHT,
};
use crate::benchmark::{Benchmark, BenchmarkManifest};
use crate::error::{Error, Result};
use crate::fidelity::Fidelity;
use crate::optimizers::{cmaes, hyperband, random_search, CmaConfig, HyperbandPlan};
use crate::record::{best_record, record_wall_time, EvalRecord};

pub const SUMMARY_FILE: &str = "summary.json";

/// A benchmark given either by registered name or by full manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BenchmarkRef {
    Name(String),
    Manifest(Box<BenchmarkManifest>),
}

impl BenchmarkRef {
    pub fn load(&self, data_dir: Option<&Path>) -> Result<Benchmark> {
        match self {
            BenchmarkRef::Name(name) => Benchmark::by_name(name, data_dir),
            BenchmarkRef::Manifest(m) => Benchmark::from_manifest(m, data_dir),
        }
    }
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_reweight() -> usize {
    DEFAULT_N_REWEIGHT
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

fn highest() -> Fidelity {
    Fidelity::HIGHEST
}

/// Tuning method and its configuration, tagged by `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Method {
    RandomSearch {
        #[serde(default = "highest")]
        fidelity: Fidelity,
    },
    Cmaes(#[serde(default)] CmaConfig),
    Hyperband(#[serde(default)] HyperbandPlan),
    LassoCv {
        #[serde(default = "default_grid_points")]
        n_points: usize,
    },
    AdaptiveLassoCv {
        #[serde(default = "default_grid_points")]
        n_points: usize,
        #[serde(default = "default_reweight")]
        n_reweight: usize,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    SparseHo(#[serde(default)] SparseHoConfig),
    MultiStartSparseHo(#[serde(default)] SparseHoConfig),
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::RandomSearch { .. } => "random_search",
            Method::Cmaes(_) => "cmaes",
            Method::Hyperband(_) => "hyperband",
            Method::LassoCv { .. } => "lasso_cv",
            Method::AdaptiveLassoCv { .. } => "adaptive_lasso_cv",
            Method::SparseHo(_) => "sparse_ho",
            Method::MultiStartSparseHo(_) => "multi_start_sparse_ho",
        }
    }

    /// Whether repetitions differ only by seed. Grid methods and single-start
    /// descent ignore the seed.
    pub fn is_seeded(&self) -> bool {
        !matches!(
            self,
            Method::LassoCv { .. } | Method::AdaptiveLassoCv { .. } | Method::SparseHo(_)
        )
    }
}

/// Runs one repetition. `budget` counts criterion evaluations; grid methods
/// evaluate their full grid regardless, and Hyperband uses it as an
/// evaluation cap unless its plan sets its own.
pub fn run_method(bench: &Benchmark, method: &Method, budget: usize, seed: u64) -> Result<Vec<EvalRecord>> {
    if budget == 0 {
        return Err(Error::Invalid("budget must be at least 1".into()));
    }
    let mut records = match method {
        Method::RandomSearch { fidelity } => random_search(bench, budget, *fidelity, seed)?,
        Method::Cmaes(cfg) => cmaes(bench, budget, cfg, seed)?,
        Method::Hyperband(plan) => {
            let mut plan = plan.clone();
            if plan.max_cost.is_none() && plan.max_evals.is_none() && plan.rounds.is_none() {
                plan.max_evals = Some(budget);
            }
            hyperband(bench, &plan, seed)?
        }
        Method::LassoCv { n_points } => {
            let grid = GridSpec {
                n_points: *n_points,
                ..GridSpec::for_benchmark(bench)
            };
            lasso_cv(bench, &grid)?.trajectory
        }
        Method::AdaptiveLassoCv { n_points, n_reweight, eps } => {
            let grid = GridSpec {
                n_points: *n_points,
                ..GridSpec::for_benchmark(bench)
            };
            adaptive_lasso_cv(bench, &grid, *n_reweight, *eps)?.trajectory
        }
        Method::SparseHo(cfg) => sparse_ho_budgeted(bench, cfg, budget)?.trajectory,
        Method::MultiStartSparseHo(cfg) => multi_start_sparse_ho(bench, cfg, budget, seed)?.trajectory,
    };
    for r in &mut records {
        r.seed = seed;
    }
    Ok(records)
}

fn default_repetitions() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub benchmark: BenchmarkRef,
    pub method: Method,
    pub budget: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Repetition `r` runs with seed `base_seed + r`.
    #[serde(default)]
    pub base_seed: u64,
    /// Off by default so reruns produce byte-identical files.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Invalid("repetitions must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Invalid("budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionFailure {
    pub repetition: usize,
    pub seed: u64,
    pub error: String,
}

/// Aggregate over the successful repetitions of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub benchmark: String,
    pub method: String,
    pub budget: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Best loss of each successful repetition, in repetition order.
    pub best: Vec<f64>,
    pub mean: Option<f64>,
    /// Population standard deviation (divisor `k`).
    pub std: Option<f64>,
    pub failures: Vec<RepetitionFailure>,
}

impl ExperimentSummary {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `(mean, population std)` of a non-empty sample.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
    Some((mean, var.sqrt()))
}

pub fn repetition_file(dir: &Path, repetition: usize) -> PathBuf {
    dir.join(format!("rep_{repetition:03}.jsonl"))
}

fn failure_file(dir: &Path, repetition: usize) -> PathBuf {
    dir.join(format!("rep_{repetition:03}.failed"))
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn encode_jsonl(records: &[EvalRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<EvalRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// Summary statistics recomputed from the trajectory files alone.
pub fn summarize_files(paths: &[PathBuf]) -> Result<Vec<f64>> {
    paths
        .iter()
        .map(|p| {
            let recs = read_trajectory(p)?;
            best_record(&recs)
                .map(|r| r.loss)
                .ok_or_else(|| Error::Invalid(format!("{} has no records", p.display())))
        })
        .collect()
}

/// Runs every repetition, writing `rep_XXX.jsonl` per success,
/// `rep_XXX.failed` per failure and `summary.json`.
pub fn run_experiment(
    manifest: &ExperimentManifest,
    data_dir: Option<&Path>,
    out_dir: &Path,
) -> Result<ExperimentSummary> {
    manifest.validate()?;
    let bench = manifest.benchmark.load(data_dir)?;
    run_experiment_on(&bench, manifest, out_dir)
}

/// Like [`run_experiment`] with an already loaded benchmark.
pub fn run_experiment_on(
    bench: &Benchmark,
    manifest: &ExperimentManifest,
    out_dir: &Path,
) -> Result<ExperimentSummary> {
    manifest.validate()?;
    fs::create_dir_all(out_dir)?;
    let _clock = record_wall_time(manifest.record_wall_time);
    let mut best = Vec::with_capacity(manifest.repetitions);
    let mut failures = Vec::new();
    for rep in 0..manifest.repetitions {
        let seed = manifest.base_seed + rep as u64;
        match run_method(bench, &manifest.method, manifest.budget, seed) {
            Ok(records) => {
                write_atomic(&repetition_file(out_dir, rep), &encode_jsonl(&records)?)?;
                let b = best_record(&records).map_or(f64::INFINITY, |r| r.loss);
                best.push(b);
            }
            Err(e) => {
                write_atomic(&failure_file(out_dir, rep), e.to_string().as_bytes())?;
                failures.push(RepetitionFailure {
                    repetition: rep,
                    seed,
                    error: e.to_string(),
                });
            }
        }
    }
    let stats = mean_std(&best);
    let summary = ExperimentSummary {
        benchmark: bench.name().to_string(),
        method: manifest.method.label().to_string(),
        budget: manifest.budget,
        repetitions: manifest.repetitions,
        base_seed: manifest.base_seed,
        best,
        mean: stats.map(|s| s.0),
        std: stats.map(|s| s.1),
        failures,
    };
    let mut bytes = serde_json::to_vec_pretty(&summary)?;
    bytes.push(b'\n');
    write_atomic(&out_dir.join(SUMMARY_FILE), &bytes)?;
    Ok(summary)
}

pub fn read_summary(dir: &Path) -> Result<ExperimentSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(dir.join(SUMMARY_FILE))?)?)
}
