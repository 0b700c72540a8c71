use serde::{Deserialize, Serialize};

use super::{refit, BaselineResult};
use crate::benchmark::Benchmark;
use crate::criteria::validation_mse;
use crate::error::{Error, Result};
use crate::fidelity::Fidelity;
use crate::lasso::{cd_cost_meter, solve_wlasso, PenaltyVector, SolverConfig};
use crate::record::Trajectory;

pub const DEFAULT_GRID_POINTS: usize = 100;
pub const DEFAULT_N_REWEIGHT: usize = 5;
pub const DEFAULT_EPS: f64 = 1e-3;

/// Scalar penalties evenly spaced in λ (log-spaced in `exp(λ)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridSpec {
    /// `DEFAULT_GRID_POINTS` points spanning the benchmark bounds.
    pub fn for_benchmark(bench: &Benchmark) -> Self {
        let (lo, hi) = bench.bounds();
        GridSpec {
            n_points: DEFAULT_GRID_POINTS,
            lo,
            hi,
        }
    }

    pub fn single(value: f64) -> Self {
        GridSpec {
            n_points: 1,
            lo: value,
            hi: value,
        }
    }

    /// Grid values, largest first.
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.n_points == 0 || !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::Invalid("grid needs finite bounds and at least one point".into()));
        }
        if self.n_points == 1 {
            return Ok(vec![self.hi]);
        }
        if self.lo >= self.hi {
            return Err(Error::Invalid(format!("grid bounds {} >= {}", self.lo, self.hi)));
        }
        let step = (self.hi - self.lo) / (self.n_points - 1) as f64;
        Ok((0..self.n_points)
            .map(|i| {
                if i == 0 {
                    self.hi
                } else {
                    self.hi - i as f64 * step
                }
            })
            .collect())
    }

    fn check_within(&self, bench: &Benchmark) -> Result<()> {
        let (lo, hi) = bench.bounds();
        let eps = 1e-12 * (hi - lo);
        if self.lo < lo - eps || self.hi > hi + eps {
            return Err(Error::Invalid(format!(
                "grid [{}, {}] exceeds benchmark bounds [{lo}, {hi}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// `exp(λ) · log(|β| + ε)`
pub fn log_penalty(beta: f64, lam: f64, eps: f64) -> f64 {
    lam.exp() * (beta.abs() + eps).ln()
}

fn finish(traj: Trajectory, best_lam: Vec<f64>, refit_beta: Vec<f64>) -> BaselineResult {
    let best_loss = traj.best().map_or(f64::INFINITY, |r| r.loss);
    BaselineResult {
        best_lam,
        best_loss,
        trajectory: traj.into_records(),
        refit_beta,
        iterates: Vec::new(),
    }
}

/// Grid search over a uniform penalty, warm-started down the path.
pub fn lasso_cv(bench: &Benchmark, grid: &GridSpec) -> Result<BaselineResult> {
    grid.check_within(bench)?;
    let d = bench.d();
    let tol = bench.criterion().tol;
    let mut traj = Trajectory::new(0);
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let mut best: Option<(f64, f64)> = None;
    for g in grid.points()? {
        let lam = vec![g; d];
        let eval = bench.evaluate_warm(&lam, tol, warm.as_deref())?;
        let z = bench.to_search_space(&lam)?.values;
        let rec = traj.push_values(
            z,
            Fidelity::HIGHEST,
            eval.value.objective(),
            eval.value.loss,
            eval.value.cost,
        );
        if best.is_none_or(|(_, l)| rec.loss < l) {
            best = Some((g, rec.loss));
        }
        warm = Some(eval.solutions.into_iter().map(|s| s.beta).collect());
    }
    let (g, _) = best.expect("grid is non-empty");
    let best_lam = vec![g; d];
    let beta = refit(bench, &best_lam, tol)?;
    Ok(finish(traj, best_lam, beta))
}

/// Reweighted Lasso for the log penalty, scored by CV on a scalar grid.
///
/// At grid value `g` each fold first solves the plain Lasso, then
/// `n_reweight` weighted problems with `λ_j = g − log(|β_j| + eps)`.
pub fn adaptive_lasso_cv(
    bench: &Benchmark,
    grid: &GridSpec,
    n_reweight: usize,
    eps: f64,
) -> Result<BaselineResult> {
    if n_reweight == 0 {
        return Err(Error::Invalid("n_reweight must be at least 1".into()));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Invalid(format!("eps = {eps} must be positive")));
    }
    grid.check_within(bench)?;
    let d = bench.d();
    let tol = bench.criterion().tol;
    let folds = bench.cv().folds();
    let mut traj = Trajectory::new(0);
    let mut plain_warm: Vec<Option<Vec<f64>>> = vec![None; folds.len()];
    let mut best: Option<(f64, f64)> = None;
    for g in grid.points()? {
        let mut per_fold = Vec::with_capacity(folds.len());
        let mut cost = 0;
        for (k, f) in folds.iter().enumerate() {
            let (beta, c, plain) = reweight(&f.train, g, n_reweight, eps, tol, plain_warm[k].take())?;
            plain_warm[k] = Some(plain);
            cost += c;
            per_fold.push(validation_mse(&f.val, &beta)?);
        }
        let raw = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
        let loss = bench.scale(raw).unwrap_or(raw);
        let z = bench.to_search_space(&vec![g; d])?.values;
        traj.push_values(z, Fidelity::HIGHEST, loss, raw, cost);
        if best.is_none_or(|(_, l)| loss < l) {
            best = Some((g, loss));
        }
    }
    let (g, _) = best.expect("grid is non-empty");
    let (lam, beta) = reweight_full(bench, g, n_reweight, eps, tol)?;
    Ok(finish(traj, lam, beta))
}

/// Returns the final coefficients, the summed cost and the plain-Lasso
/// solution (used to warm-start the next grid point).
fn reweight(
    train: &crate::lasso::Dataset,
    g: f64,
    n_reweight: usize,
    eps: f64,
    tol: f64,
    warm: Option<Vec<f64>>,
) -> Result<(Vec<f64>, u64, Vec<f64>)> {
    let d = train.d();
    let mut cfg = SolverConfig::new(tol);
    if let Some(w) = warm {
        cfg = cfg.with_warm_start(w);
    }
    let sol = solve_wlasso(train, &PenaltyVector::uniform(g, d)?, &cfg)?;
    let mut cost = cd_cost_meter(&sol, train);
    let plain = sol.beta.clone();
    let mut beta = sol.beta;
    for _ in 0..n_reweight {
        let lam = reweighted_penalty(g, &beta, eps)?;
        let sol = solve_wlasso(train, &lam, &SolverConfig::new(tol).with_warm_start(beta))?;
        cost += cd_cost_meter(&sol, train);
        beta = sol.beta;
    }
    Ok((beta, cost, plain))
}

fn reweighted_penalty(g: f64, beta: &[f64], eps: f64) -> Result<PenaltyVector> {
    PenaltyVector::new(beta.iter().map(|b| g - (b.abs() + eps).ln()).collect())
}

fn reweight_full(
    bench: &Benchmark,
    g: f64,
    n_reweight: usize,
    eps: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ds = bench.dataset();
    let mut lam = PenaltyVector::uniform(g, ds.d())?;
    let mut beta = solve_wlasso(ds, &lam, &SolverConfig::new(tol))?.beta;
    for _ in 0..n_reweight {
        lam = reweighted_penalty(g, &beta, eps)?;
        beta = solve_wlasso(ds, &lam, &SolverConfig::new(tol).with_warm_start(beta))?.beta;
    }
    Ok((lam.into_inner(), beta))
}
