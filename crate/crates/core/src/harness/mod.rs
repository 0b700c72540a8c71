//! Experiment orchestration, result files, analyses and the evaluation
//! service for external optimizers.

mod analysis;
mod experiment;
mod export;
mod service;

pub use analysis::{
    estimate_effective_dim, fidelity_correlation, mean_highest_fidelity_cost, pearson, CorrelationMatrix,
};
pub use experiment::{
    encode_jsonl, mean_std, read_summary, read_trajectory, repetition_file, run_experiment, run_experiment_on,
    run_method, summarize_files, write_atomic, BenchmarkRef, ExperimentManifest, ExperimentSummary, Method,
    RepetitionFailure, SUMMARY_FILE,
};
pub use export::{export_plotdata, load_runs, trajectory_files, Axis};
pub use service::{handle_request, serve_lines, serve_stdio, serve_tcp};
