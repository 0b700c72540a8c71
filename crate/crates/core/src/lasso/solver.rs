use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, PenaltyVector};
use crate::error::{check_len, Error, Result};

/// Passes between two duality-gap evaluations.
pub const GAP_CHECK_PERIOD: usize = 10;

pub const DEFAULT_MAX_PASSES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once `gap <= tol * ‖y‖² / n`.
    pub tol: f64,
    pub max_passes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<Vec<f64>>,
}

impl SolverConfig {
    pub fn new(tol: f64) -> Self {
        SolverConfig {
            tol,
            max_passes: DEFAULT_MAX_PASSES,
            warm_start: None,
        }
    }

    pub fn with_warm_start(mut self, beta: Vec<f64>) -> Self {
        self.warm_start = Some(beta);
        self
    }

    pub fn with_max_passes(mut self, max_passes: usize) -> Self {
        self.max_passes = max_passes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1.0) {
            return Err(Error::Invalid(format!("tolerance {} outside (0, 1]", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(Error::Invalid("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(1e-4)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WLassoSolution {
    pub beta: Vec<f64>,
    /// Sorted indices of the nonzero coefficients.
    pub support: Vec<usize>,
    pub gap: f64,
    pub n_passes: usize,
    pub primal: f64,
}

impl WLassoSolution {
    /// True when the solver stopped on the pass ceiling rather than the gap.
    pub fn hit_max_passes(&self, cfg: &SolverConfig) -> bool {
        self.n_passes >= cfg.max_passes
    }
}

/// `sign(x) * max(|x| - t, 0)`
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `(1/2n)‖y − Xβ‖² + Σ_j exp(lam_j)|β_j|`
pub fn primal_objective(ds: &Dataset, lam: &PenaltyVector, beta: &[f64]) -> Result<f64> {
    check_len("penalty vector", ds.d(), lam.len())?;
    let r = ds.residual(beta)?;
    Ok(primal_from_residual(ds.n(), &r, &lam.weights(), beta))
}

fn primal_from_residual(n: usize, r: &[f64], weights: &[f64], beta: &[f64]) -> f64 {
    let rss: f64 = r.iter().map(|v| v * v).sum();
    let pen: f64 = weights.iter().zip(beta).map(|(w, b)| w * b.abs()).sum();
    rss / (2.0 * n as f64) + pen
}

/// Primal minus dual objective at the residual-rescaled dual point.
pub fn duality_gap(ds: &Dataset, lam: &PenaltyVector, beta: &[f64]) -> Result<f64> {
    check_len("penalty vector", ds.d(), lam.len())?;
    let r = ds.residual(beta)?;
    Ok(gap_from_residual(ds, &r, &lam.weights(), beta).0)
}

/// Returns `(gap, primal)`.
fn gap_from_residual(ds: &Dataset, r: &[f64], weights: &[f64], beta: &[f64]) -> (f64, f64) {
    let n = ds.n() as f64;
    let primal = primal_from_residual(ds.n(), r, weights, beta);
    let mut scale = 1.0_f64;
    for (j, &w) in weights.iter().enumerate() {
        if ds.column_norms_sq()[j] == 0.0 {
            continue;
        }
        scale = scale.max(ds.col_dot(j, r).abs() / (n * w));
    }
    // θ = r / (n s); D(θ) = ‖y‖²/2n − (n/2)‖θ − y/n‖²
    let dist: f64 = r
        .iter()
        .zip(ds.y())
        .map(|(ri, yi)| {
            let t = ri / (n * scale) - yi / n;
            t * t
        })
        .sum();
    let dual = ds.y_norm_sq() / (2.0 * n) - 0.5 * n * dist;
    (primal - dual, primal)
}

/// Cyclic coordinate descent on the weighted Lasso with duality-gap stopping.
pub fn solve_wlasso(ds: &Dataset, lam: &PenaltyVector, cfg: &SolverConfig) -> Result<WLassoSolution> {
    cfg.validate()?;
    check_len("penalty vector", ds.d(), lam.len())?;
    let d = ds.d();
    let n = ds.n() as f64;
    let weights = lam.weights();
    let norms = ds.column_norms_sq();

    let mut beta = match &cfg.warm_start {
        Some(w) => {
            check_len("warm start", d, w.len())?;
            if !w.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("warm start".into()));
            }
            w.iter()
                .zip(norms)
                .map(|(&b, &ns)| if ns == 0.0 { 0.0 } else { b })
                .collect()
        }
        None => vec![0.0; d],
    };
    let mut r = ds.residual(&beta)?;
    let threshold = cfg.tol * ds.y_norm_sq() / n;
    let thresholds: Vec<f64> = weights.iter().map(|w| n * w).collect();

    let (mut gap, mut primal) = gap_from_residual(ds, &r, &weights, &beta);
    let mut passes = 0;
    while gap > threshold && passes < cfg.max_passes {
        for j in 0..d {
            let ns = norms[j];
            if ns == 0.0 {
                continue;
            }
            let old = beta[j];
            let z = old * ns + ds.col_dot(j, &r);
            let new = soft_threshold(z, thresholds[j]) / ns;
            if new != old {
                ds.col_axpy(j, old - new, &mut r);
                beta[j] = new;
            }
        }
        passes += 1;
        if passes == 1 || passes % GAP_CHECK_PERIOD == 0 || passes == cfg.max_passes {
            if !beta.iter().all(|b| b.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "coefficients after pass {passes} (ill-conditioned input?)"
                )));
            }
            (gap, primal) = gap_from_residual(ds, &r, &weights, &beta);
            if !gap.is_finite() {
                return Err(Error::NonFinite("duality gap".into()));
            }
        }
    }
    let support = beta
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(j, _)| j)
        .collect();
    Ok(WLassoSolution {
        beta,
        support,
        gap,
        n_passes: passes,
        primal,
    })
}

/// Abstract work units of a solve: one coordinate-descent pass costs `n * d`.
pub fn cd_cost_meter(sol: &WLassoSolution, ds: &Dataset) -> u64 {
    (sol.n_passes as u64) * (ds.n() as u64) * (ds.d() as u64)
}
