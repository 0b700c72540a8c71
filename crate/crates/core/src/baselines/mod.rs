//! Lasso tuning baselines: grid-search CV, adaptive (log-penalty) CV and
//! hypergradient descent with optional random restarts.

mod grid;
mod sparse_ho;

pub use grid::{adaptive_lasso_cv, lasso_cv, log_penalty, GridSpec, DEFAULT_GRID_POINTS, DEFAULT_N_REWEIGHT, DEFAULT_EPS};
pub use sparse_ho::{
    multi_start_sparse_ho, sparse_ho, sparse_ho_budgeted, sparse_ho_gradient, ArmijoConfig,
    HyperGradient, SparseHoConfig,
};

use crate::benchmark::Benchmark;
use crate::error::Result;
use crate::lasso::{solve_wlasso, PenaltyVector, SolverConfig};
use crate::record::EvalRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub best_lam: Vec<f64>,
    pub best_loss: f64,
    pub trajectory: Vec<EvalRecord>,
    /// Coefficients refit on the full dataset at `best_lam`.
    pub refit_beta: Vec<f64>,
    /// Ordinals of accepted descent iterates (empty for grid methods).
    pub iterates: Vec<u64>,
}

impl BaselineResult {
    /// `‖refit_beta‖₀`
    pub fn support_size(&self) -> usize {
        self.refit_beta.iter().filter(|b| **b != 0.0).count()
    }
}

pub(crate) fn refit(bench: &Benchmark, lam: &[f64], tol: f64) -> Result<Vec<f64>> {
    let pv = PenaltyVector::new(lam.to_vec())?;
    Ok(solve_wlasso(bench.dataset(), &pv, &SolverConfig::new(tol))?.beta)
}
