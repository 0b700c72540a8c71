use std::fs;
use std::io::BufWriter;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use wlasso_hpo::benchgen::{make_synthetic_data, SyntheticSpec};
use wlasso_hpo::harness::{self, Axis, ExperimentManifest};
use wlasso_hpo::ingest::{registry_entry, write_libsvm, DATA_DIR_ENV};
use wlasso_hpo::{Benchmark, BenchmarkManifest, Error, Fidelity};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "wlhpo", version, about = "Weighted-Lasso hyperparameter optimization toolkit")]
struct Cli {
    /// Directory holding LIBSVM data files and generated benchmarks.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark manifest and its data.
    Generate {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the data directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute an experiment manifest.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a single search-space point.
    Eval {
        #[arg(long)]
        benchmark: String,
        /// JSON array of search-space coordinates, or `default`.
        #[arg(long)]
        z: String,
        /// JSON fidelity, e.g. '{"discrete":3}'.
        #[arg(long)]
        fidelity: Option<String>,
    },
    /// Answer line-delimited JSON evaluation requests.
    Serve {
        #[arg(long)]
        benchmark: String,
        #[arg(long, value_enum, default_value = "stdio")]
        transport: Transport,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
    /// Pearson correlation of losses across the discrete fidelities.
    FidelityCorr {
        #[arg(long)]
        benchmark: String,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Best-so-far curves of run directories as CSV.
    Export {
        #[arg(long, required = true, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "ordinal")]
        axis: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the penalty bounds of a benchmark.
    Bounds {
        #[arg(long)]
        benchmark: String,
    },
    /// Support size of the refit at the hypergradient-tuned penalty.
    EstimateDe {
        #[arg(long)]
        benchmark: String,
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Transport {
    Stdio,
    Tcp,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_) | Error::Unknown { .. } | Error::Dimension { .. } | Error::Json(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn print_json(v: &impl serde::Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(v).map_err(Error::from)?);
    Ok(())
}

/// A preset name, a registered dataset name, or a path to a benchmark manifest.
fn load_benchmark(spec: &str, data_dir: Option<&Path>) -> CliResult<Benchmark> {
    let path = Path::new(spec);
    if spec.ends_with(".json") && path.is_file() {
        let m: BenchmarkManifest = serde_json::from_str(&fs::read_to_string(path)?).map_err(Error::from)?;
        return Ok(Benchmark::from_manifest(&m, data_dir)?);
    }
    if SyntheticSpec::preset(spec).is_ok() {
        return Ok(Benchmark::preset(spec)?);
    }
    let entry = registry_entry(spec)?;
    if data_dir.is_none() && !Path::new(&entry.source).is_absolute() {
        return Err(config_error(format!(
            "dataset {spec} needs a data directory; set {DATA_DIR_ENV} or pass --data-dir"
        )));
    }
    Ok(Benchmark::real(&entry, data_dir)?)
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| config_error(format!("invalid {what}: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    let data_dir = cli.data_dir.as_deref();
    match cli.command {
        Command::Generate { preset, seed, out } => {
            let mut spec = SyntheticSpec::preset(&preset)?;
            if let Some(s) = seed {
                spec = spec.with_seed(s);
            }
            let out = out
                .or_else(|| data_dir.map(Path::to_path_buf))
                .ok_or_else(|| config_error(format!("no output directory; set {DATA_DIR_ENV} or pass --out")))?;
            fs::create_dir_all(&out)?;
            let bench = Benchmark::synthetic(preset.as_str(), &spec)?;
            let data = make_synthetic_data(&spec, &preset)?;
            let manifest_path = out.join(format!("{preset}.manifest.json"));
            let data_path = out.join(format!("{preset}.svm"));
            let beta_path = out.join(format!("{preset}.beta.json"));
            let mut manifest = serde_json::to_vec_pretty(&bench.manifest()).map_err(Error::from)?;
            manifest.push(b'\n');
            harness::write_atomic(&manifest_path, &manifest)?;
            write_libsvm(&data.dataset, BufWriter::new(fs::File::create(&data_path)?))?;
            let beta = serde_json::to_vec(&data.beta_true).map_err(Error::from)?;
            harness::write_atomic(&beta_path, &beta)?;
            print_json(&json!({
                "manifest": manifest_path,
                "data": data_path,
                "beta_true": beta_path,
            }))
        }
        Command::Run { manifest, out } => {
            let m: ExperimentManifest = parse_json("experiment manifest", &fs::read_to_string(&manifest)?)?;
            let summary = harness::run_experiment(&m, data_dir, &out)?;
            print_json(&summary)?;
            if summary.complete() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_RUNTIME,
                    message: format!("{} repetition(s) failed", summary.failures.len()),
                })
            }
        }
        Command::Eval { benchmark, z, fidelity } => {
            let bench = load_benchmark(&benchmark, data_dir)?;
            let z: Vec<f64> = if z == "default" {
                bench.default_init()
            } else {
                parse_json("z", &z)?
            };
            let fidelity: Fidelity = match fidelity {
                Some(f) => parse_json("fidelity", &f)?,
                None => Fidelity::HIGHEST,
            };
            let req = json!({ "op": "eval", "z": z, "fidelity": fidelity });
            let resp = harness::handle_request(&bench, &req.to_string());
            print_json(&resp)?;
            match resp.get("error").and_then(|e| e.as_str()) {
                None => Ok(()),
                Some("evaluation") => Err(Failure {
                    code: EXIT_RUNTIME,
                    message: resp["message"].to_string(),
                }),
                Some(kind) => Err(config_error(format!("eval rejected: {kind}"))),
            }
        }
        Command::Serve { benchmark, transport, port } => {
            let bench = load_benchmark(&benchmark, data_dir)?;
            match transport {
                Transport::Stdio => Ok(harness::serve_stdio(&bench)?),
                Transport::Tcp => {
                    let listener = TcpListener::bind(("127.0.0.1", port))?;
                    eprintln!("listening on {}", listener.local_addr()?);
                    Ok(harness::serve_tcp(Arc::new(bench), listener)?)
                }
            }
        }
        Command::FidelityCorr { benchmark, probes, seed } => {
            let bench = load_benchmark(&benchmark, data_dir)?;
            let m = harness::fidelity_correlation(&bench, probes, seed)?;
            print_json(&json!({ "levels": m.levels, "matrix": m.matrix }))
        }
        Command::Export { runs, axis, out } => {
            let axis: Axis = axis.parse()?;
            let csv = harness::export_plotdata(&harness::load_runs(&runs)?, axis)?;
            match out {
                Some(p) => harness::write_atomic(&p, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Bounds { benchmark } => {
            let bench = load_benchmark(&benchmark, data_dir)?;
            let (lo, hi) = bench.bounds();
            print_json(&json!({
                "name": bench.name(),
                "lam_min": lo,
                "lam_max": hi,
                "lam_default": bench.default_lambda(),
            }))
        }
        Command::EstimateDe { benchmark, budget } => {
            let bench = load_benchmark(&benchmark, data_dir)?;
            let de = harness::estimate_effective_dim(&bench, budget)?;
            print_json(&json!({ "name": bench.name(), "d": bench.d(), "d_e_hat": de }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
