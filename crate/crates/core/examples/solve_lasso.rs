//! Solve one weighted Lasso with coordinate descent and inspect the
//! certificate that came with it.

use wlasso_hpo::lasso::{duality_gap, solve_wlasso, Dataset, PenaltyVector, SolverConfig};
use wlasso_hpo::benchgen::compute_lambda_max;

fn main() -> wlasso_hpo::Result<()> {
    let rows = vec![
        vec![1.0, 0.5, 0.0],
        vec![0.0, 1.0, 0.3],
        vec![2.0, 0.0, 1.0],
        vec![0.5, 0.5, 0.5],
        vec![1.5, 1.0, 0.0],
    ];
    let y = vec![2.0, 1.0, 4.5, 1.4, 3.6];
    let ds = Dataset::from_rows("toy", &rows, y)?;

    let lam_max = compute_lambda_max(&ds)?;
    println!("lambda_max = {lam_max:.4}");

    // Heavier penalty on the third feature.
    let lam = PenaltyVector::new(vec![lam_max - 3.0, lam_max - 3.0, lam_max - 0.5])?;
    let sol = solve_wlasso(&ds, &lam, &SolverConfig::new(1e-8))?;
    println!("beta    = {:?}", sol.beta);
    println!("support = {:?}", sol.support);
    println!("passes  = {}, gap = {:.2e}", sol.n_passes, sol.gap);
    println!("recomputed gap = {:.2e}", duality_gap(&ds, &lam, &sol.beta)?);

    let zero = solve_wlasso(&ds, &PenaltyVector::uniform(lam_max, 3)?, &SolverConfig::default())?;
    println!("at lambda_max the solution is {:?}", zero.beta);
    Ok(())
}
