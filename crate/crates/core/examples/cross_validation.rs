//! The outer objective: K-fold validation error of the weighted Lasso as a
//! function of the log-penalties.

use wlasso_hpo::benchgen::{compute_lambda_max, make_synthetic_data, SyntheticSpec};
use wlasso_hpo::criteria::{cv_loss, make_folds, CvConfig};
use wlasso_hpo::lasso::PenaltyVector;

fn main() -> wlasso_hpo::Result<()> {
    let data = make_synthetic_data(&SyntheticSpec::new(40, 20, 2), "cv-demo")?;
    let ds = &data.dataset;
    let cfg = CvConfig::default();

    for (k, fold) in make_folds(ds.n(), &cfg)?.iter().enumerate() {
        println!("fold {k}: {} train / {} validation", fold.train.len(), fold.val.len());
    }

    let lam_max = compute_lambda_max(ds)?;
    for shift in [0.0, 1.0, 2.0, 3.0, 4.0] {
        let lam = PenaltyVector::uniform(lam_max - shift, ds.d())?;
        let v = cv_loss(ds, &lam, &cfg)?;
        println!("lambda = lambda_max - {shift}: cv mse {:.4} (cost {})", v.loss, v.cost);
    }
    Ok(())
}
