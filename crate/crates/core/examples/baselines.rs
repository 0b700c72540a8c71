//! The Lasso tuning baselines on one benchmark: grid-search CV, adaptive
//! reweighting, hypergradient descent and its restarted variant.

use wlasso_hpo::baselines::{
    adaptive_lasso_cv, lasso_cv, multi_start_sparse_ho, sparse_ho, GridSpec, SparseHoConfig,
    DEFAULT_EPS, DEFAULT_N_REWEIGHT,
};
use wlasso_hpo::Benchmark;

fn main() -> wlasso_hpo::Result<()> {
    let bench = Benchmark::preset("synt_simple")?;
    let grid = GridSpec::for_benchmark(&bench);

    let cv = lasso_cv(&bench, &grid)?;
    println!("LassoCV          loss {:.4}  support {}", cv.best_loss, cv.support_size());

    let ada = adaptive_lasso_cv(&bench, &grid, DEFAULT_N_REWEIGHT, DEFAULT_EPS)?;
    println!("AdaptiveLassoCV  loss {:.4}  support {}", ada.best_loss, ada.support_size());

    let cfg = SparseHoConfig::default();
    let sho = sparse_ho(&bench, &cfg)?;
    println!(
        "Sparse-HO        loss {:.4}  support {}  ({} evaluations, {} iterates)",
        sho.best_loss,
        sho.support_size(),
        sho.trajectory.len(),
        sho.iterates.len()
    );

    let ms = multi_start_sparse_ho(&bench, &cfg, 200, 7)?;
    println!("Multi-start      loss {:.4}  support {}", ms.best_loss, ms.support_size());
    println!("true support     {}", bench.beta_true().unwrap().iter().filter(|b| **b != 0.0).count());
    Ok(())
}
