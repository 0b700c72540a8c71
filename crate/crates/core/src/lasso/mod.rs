//! Weighted-Lasso inner problem: data container and coordinate-descent solver.

mod dataset;
mod solver;

pub use dataset::{ColumnIter, Dataset, Design, PenaltyVector};
pub use solver::{
    cd_cost_meter, duality_gap, primal_objective, soft_threshold, solve_wlasso, SolverConfig,
    WLassoSolution, DEFAULT_MAX_PASSES, GAP_CHECK_PERIOD,
};
