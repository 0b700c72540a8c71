//! K-fold cross-validation criterion on top of the weighted-Lasso solver.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lasso::{cd_cost_meter, solve_wlasso, Dataset, PenaltyVector, SolverConfig, WLassoSolution};

pub const DEFAULT_K_FOLDS: usize = 5;
pub const DEFAULT_FOLD_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k_folds: usize,
    pub fold_seed: u64,
    /// Inner-solver tolerance used at the highest fidelity.
    pub tol: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k_folds: DEFAULT_K_FOLDS,
            fold_seed: DEFAULT_FOLD_SEED,
            tol: 1e-4,
        }
    }
}

impl CvConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_folds < 2 {
            return Err(Error::Invalid(format!("k_folds = {} < 2", self.k_folds)));
        }
        if self.k_folds > n {
            return Err(Error::Invalid(format!(
                "k_folds = {} exceeds sample count {n}",
                self.k_folds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
}

/// Shuffles `0..n` with the fold seed and cuts it into `k` contiguous blocks;
/// the first `n % k` blocks get one extra row.
pub fn make_folds(n: usize, cfg: &CvConfig) -> Result<Vec<Fold>> {
    cfg.validate(n)?;
    let k = cfg.k_folds;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.fold_seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        let mut val = order[start..start + size].to_vec();
        val.sort_unstable();
        let mut in_val = vec![false; n];
        for &i in &val {
            in_val[i] = true;
        }
        let train = (0..n).filter(|&i| !in_val[i]).collect();
        folds.push(Fold { train, val });
        start += size;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionValue {
    /// Mean validation MSE across folds.
    pub loss: f64,
    pub per_fold: Vec<f64>,
    /// Summed coordinate-descent work units across folds.
    pub cost: u64,
    /// `loss / reference_loss` when a reference is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaled: Option<f64>,
}

impl CriterionValue {
    fn from_folds(per_fold: Vec<f64>, cost: u64) -> Self {
        let loss = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
        CriterionValue {
            loss,
            per_fold,
            cost,
            scaled: None,
        }
    }

    /// Scaled loss when present, raw loss otherwise.
    pub fn objective(&self) -> f64 {
        self.scaled.unwrap_or(self.loss)
    }
}

#[derive(Debug, Clone)]
pub struct FoldData {
    pub fold: Fold,
    pub train: Dataset,
    pub val: Dataset,
}

/// A dataset pre-split into folds; built once per benchmark so every λ sees
/// the same partition.
#[derive(Debug, Clone)]
pub struct CvProblem {
    folds: Vec<FoldData>,
    d: usize,
}

/// Criterion value plus the per-fold inner solutions that produced it.
#[derive(Debug, Clone)]
pub struct CvEvaluation {
    pub value: CriterionValue,
    pub solutions: Vec<WLassoSolution>,
}

impl CvProblem {
    pub fn new(ds: &Dataset, cfg: &CvConfig) -> Result<Self> {
        let folds = make_folds(ds.n(), cfg)?
            .into_iter()
            .map(|fold| {
                if fold.val.is_empty() || fold.train.is_empty() {
                    return Err(Error::Invalid("empty fold".into()));
                }
                Ok(FoldData {
                    train: ds.subset_rows(&fold.train)?,
                    val: ds.subset_rows(&fold.val)?,
                    fold,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CvProblem { folds, d: ds.d() })
    }

    pub fn folds(&self) -> &[FoldData] {
        &self.folds
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Solves every fold at `tol`, optionally warm-starting fold `k` from `warm[k]`.
    pub fn evaluate(
        &self,
        lam: &PenaltyVector,
        tol: f64,
        warm: Option<&[Vec<f64>]>,
    ) -> Result<CvEvaluation> {
        check_len("penalty vector", self.d, lam.len())?;
        if let Some(w) = warm {
            check_len("warm starts", self.k(), w.len())?;
        }
        let mut per_fold = Vec::with_capacity(self.k());
        let mut solutions = Vec::with_capacity(self.k());
        let mut cost = 0;
        for (k, f) in self.folds.iter().enumerate() {
            let mut cfg = SolverConfig::new(tol);
            if let Some(w) = warm {
                cfg = cfg.with_warm_start(w[k].clone());
            }
            let sol = solve_wlasso(&f.train, lam, &cfg)?;
            cost += cd_cost_meter(&sol, &f.train);
            per_fold.push(validation_mse(&f.val, &sol.beta)?);
            solutions.push(sol);
        }
        Ok(CvEvaluation {
            value: CriterionValue::from_folds(per_fold, cost),
            solutions,
        })
    }

    /// Criterion obtained by predicting each validation fold with a fixed
    /// coefficient vector (no inner solve).
    pub fn evaluate_fixed(&self, beta: &[f64]) -> Result<CriterionValue> {
        let per_fold = self
            .folds
            .iter()
            .map(|f| validation_mse(&f.val, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(CriterionValue::from_folds(per_fold, 0))
    }

    /// Criterion from one coefficient vector per fold.
    pub fn evaluate_per_fold(&self, betas: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_len("per-fold coefficients", self.k(), betas.len())?;
        self.folds
            .iter()
            .zip(betas)
            .map(|(f, b)| validation_mse(&f.val, b))
            .collect()
    }
}

/// `(1/|val|)‖y_val − X_val β‖²`
pub fn validation_mse(val: &Dataset, beta: &[f64]) -> Result<f64> {
    let r = val.residual(beta)?;
    Ok(r.iter().map(|v| v * v).sum::<f64>() / val.n() as f64)
}

/// Cross-validated MSE of the weighted Lasso at `lam`.
pub fn cv_loss(ds: &Dataset, lam: &PenaltyVector, cfg: &CvConfig) -> Result<CriterionValue> {
    Ok(CvProblem::new(ds, cfg)?.evaluate(lam, cfg.tol, None)?.value)
}
