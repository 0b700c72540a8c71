//! Hyperparameter optimization for the weighted Lasso.
//!
//! The inner problem is a Lasso with one penalty `exp(λ_j)` per feature,
//! solved by coordinate descent ([`lasso`]). The outer objective is the
//! K-fold cross-validation MSE of that solution as a function of `λ ∈ R^d`
//! ([`criteria`]). On top of this sit reproducible synthetic and real-world
//! benchmarks ([`benchgen`], [`ingest`], [`benchmark`]), the classic Lasso
//! tuning baselines ([`baselines`]), sampling-based optimizers
//! ([`optimizers`]) and an experiment harness with a JSON-lines evaluation
//! service ([`harness`]).

pub mod baselines;
pub mod benchgen;
pub mod benchmark;
pub mod criteria;
pub mod error;
pub mod fidelity;
pub mod harness;
pub mod ingest;
pub mod lasso;
pub mod optimizers;
pub mod record;

pub use benchmark::{Benchmark, BenchmarkManifest, BenchmarkSource};
pub use error::{Error, Result};
pub use fidelity::Fidelity;
pub use record::EvalRecord;
