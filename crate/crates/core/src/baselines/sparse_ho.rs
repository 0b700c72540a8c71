//! Hypergradient descent on the CV criterion via implicit differentiation
//! restricted to the Lasso support.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{refit, BaselineResult};
use crate::benchmark::Benchmark;
use crate::criteria::CriterionValue;
use crate::error::{check_len, Error, Result};
use crate::fidelity::Fidelity;
use crate::lasso::{cd_cost_meter, solve_wlasso, Dataset, PenaltyVector, SolverConfig, WLassoSolution};
use crate::record::Trajectory;

/// Backtracking parameters. The first trial step moves the coordinate with
/// the largest gradient by `initial_step` in λ units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmijoConfig {
    pub initial_step: f64,
    pub shrink: f64,
    pub slope: f64,
    pub max_halvings: usize,
    /// Steps shorter than this (sup-norm, λ units) count as collapsed.
    pub min_step: f64,
}

impl Default for ArmijoConfig {
    fn default() -> Self {
        ArmijoConfig {
            initial_step: 1.0,
            shrink: 0.5,
            slope: 1e-4,
            max_halvings: 30,
            min_step: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SparseHoConfig {
    /// Starting point in search-space coordinates; `None` uses the
    /// benchmark's default initialization.
    pub init: Option<Vec<f64>>,
    pub max_outer_iters: usize,
    /// Outer iterations per leg of the multi-start variant.
    pub restart_period: usize,
    pub step_rule: ArmijoConfig,
    pub inner_tol: f64,
}

impl Default for SparseHoConfig {
    fn default() -> Self {
        SparseHoConfig {
            init: None,
            max_outer_iters: 100,
            restart_period: 20,
            step_rule: ArmijoConfig::default(),
            inner_tol: 1e-4,
        }
    }
}

impl SparseHoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 || self.restart_period == 0 {
            return Err(Error::Invalid(
                "max_outer_iters and restart_period must be at least 1".into(),
            ));
        }
        let s = &self.step_rule;
        if !(s.initial_step > 0.0 && s.shrink > 0.0 && s.shrink < 1.0 && s.slope >= 0.0) {
            return Err(Error::Invalid("invalid line-search parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HyperGradient {
    pub value: CriterionValue,
    /// Gradient of the raw (unscaled) CV loss with respect to λ.
    pub grad: Vec<f64>,
    /// Some fold needed a ridge term to solve its support system.
    pub regularized: bool,
    /// Some fold changed support when re-solved at a tighter tolerance.
    pub support_changed: bool,
}

/// CV loss and its gradient with respect to λ.
///
/// For fold `k` with support `S`, the Jacobian of `β_S` solves
/// `(X_Sᵀ X_S) J = −n · diag(exp(λ_S) ⊙ sign(β_S))`; coordinates outside the
/// support have zero derivative.
pub fn sparse_ho_gradient(bench: &Benchmark, lam: &[f64], cfg: &SparseHoConfig) -> Result<HyperGradient> {
    check_len("penalty vector", bench.d(), lam.len())?;
    let pv = PenaltyVector::new(lam.to_vec())?;
    let folds = bench.cv().folds();
    let k = folds.len() as f64;
    let mut grad = vec![0.0; bench.d()];
    let mut per_fold = Vec::with_capacity(folds.len());
    let mut cost = 0;
    let mut regularized = false;
    let mut support_changed = false;
    for f in folds {
        let (sol, c, changed) = stable_solve(&f.train, &pv, cfg.inner_tol)?;
        cost += c;
        support_changed |= changed;
        let resid_val = f.val.residual(&sol.beta)?;
        per_fold.push(resid_val.iter().map(|r| r * r).sum::<f64>() / f.val.n() as f64);
        if sol.support.is_empty() {
            continue;
        }
        let (g, reg) = fold_hypergradient(&f.train, &f.val, &sol, lam, &resid_val)?;
        regularized |= reg;
        for (&j, gj) in sol.support.iter().zip(g) {
            grad[j] += gj / k;
        }
    }
    let loss = per_fold.iter().sum::<f64>() / k;
    Ok(HyperGradient {
        value: CriterionValue {
            loss,
            per_fold,
            cost,
            scaled: bench.scale(loss),
        },
        grad,
        regularized,
        support_changed,
    })
}

/// Solves at `tol`, then re-solves at `tol / 10` from that solution; the
/// tighter solution is kept whenever the supports disagree.
fn stable_solve(train: &Dataset, lam: &PenaltyVector, tol: f64) -> Result<(WLassoSolution, u64, bool)> {
    let first = solve_wlasso(train, lam, &SolverConfig::new(tol))?;
    let mut cost = cd_cost_meter(&first, train);
    let cfg = SolverConfig::new(tol / 10.0).with_warm_start(first.beta.clone());
    let second = solve_wlasso(train, lam, &cfg)?;
    cost += cd_cost_meter(&second, train);
    if second.support != first.support {
        Ok((second, cost, true))
    } else {
        Ok((first, cost, false))
    }
}

/// Gradient entries on the support of `sol`, in support order.
fn fold_hypergradient(
    train: &Dataset,
    val: &Dataset,
    sol: &WLassoSolution,
    lam: &[f64],
    resid_val: &[f64],
) -> Result<(Vec<f64>, bool)> {
    let s = &sol.support;
    let m = s.len();
    let gram = DMatrix::from_fn(m, m, |a, b| train.col_col_dot(s[a], s[b]));
    // ∇_β C = (2/|val|) X_valᵀ (X_val β − y_val)
    let scale = -2.0 / val.n() as f64;
    let rhs = DVector::from_iterator(m, s.iter().map(|&j| scale * val.col_dot(j, resid_val)));
    let (v, regularized) = match gram.clone().cholesky() {
        Some(ch) => (ch.solve(&rhs), false),
        None => {
            let trace = gram.trace() / m as f64;
            let ridge = 1e-10 * trace.max(1.0);
            let reg = gram + DMatrix::identity(m, m) * ridge;
            let v = reg
                .cholesky()
                .map(|c| c.solve(&rhs))
                .ok_or_else(|| Error::Degenerate("support Gram matrix is singular".into()))?;
            (v, true)
        }
    };
    let n = train.n() as f64;
    let g = s
        .iter()
        .zip(v.iter())
        .map(|(&j, vj)| -n * lam[j].exp() * sol.beta[j].signum() * vj)
        .collect();
    Ok((g, regularized))
}

fn clip(bench: &Benchmark, lam: &mut [f64]) {
    let (lo, hi) = bench.bounds();
    for l in lam {
        *l = l.clamp(lo, hi);
    }
}

fn record(bench: &Benchmark, traj: &mut Trajectory, lam: &[f64], hg: &HyperGradient) -> Result<()> {
    let z = bench.to_search_space(lam)?.values;
    traj.push_values(
        z,
        Fidelity::HIGHEST,
        hg.value.objective(),
        hg.value.loss,
        hg.value.cost,
    );
    Ok(())
}

enum LegEnd {
    Budget,
    Stalled,
    Iterations,
}

/// One projected gradient-descent leg. Every criterion evaluation is
/// recorded and counts against `max_evals`.
fn descend(
    bench: &Benchmark,
    start: Vec<f64>,
    cfg: &SparseHoConfig,
    max_iters: usize,
    max_evals: usize,
    traj: &mut Trajectory,
    iterates: &mut Vec<u64>,
) -> Result<LegEnd> {
    if max_evals == 0 {
        return Ok(LegEnd::Budget);
    }
    let mut evals = 0;
    let mut lam = start;
    clip(bench, &mut lam);
    let mut hg = sparse_ho_gradient(bench, &lam, cfg)?;
    evals += 1;
    record(bench, traj, &lam, &hg)?;
    iterates.push(traj.len() as u64 - 1);
    let rule = &cfg.step_rule;
    for _ in 0..max_iters {
        let gmax = hg.grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        if gmax == 0.0 {
            return Ok(LegEnd::Stalled);
        }
        let mut t = rule.initial_step / gmax;
        let mut accepted = None;
        for _ in 0..=rule.max_halvings {
            let mut cand: Vec<f64> = lam.iter().zip(&hg.grad).map(|(l, g)| l - t * g).collect();
            clip(bench, &mut cand);
            let step_len = lam
                .iter()
                .zip(&cand)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if step_len < rule.min_step {
                break;
            }
            if evals >= max_evals {
                return Ok(LegEnd::Budget);
            }
            let trial = sparse_ho_gradient(bench, &cand, cfg)?;
            evals += 1;
            record(bench, traj, &cand, &trial)?;
            let decrease: f64 = hg
                .grad
                .iter()
                .zip(lam.iter().zip(&cand))
                .map(|(g, (a, b))| g * (a - b))
                .sum();
            if trial.value.loss <= hg.value.loss - rule.slope * decrease {
                accepted = Some((cand, trial));
                break;
            }
            t *= rule.shrink;
        }
        match accepted {
            Some((cand, trial)) => {
                lam = cand;
                hg = trial;
                iterates.push(traj.len() as u64 - 1);
            }
            None => return Ok(LegEnd::Stalled),
        }
    }
    Ok(LegEnd::Iterations)
}

fn start_lambda(bench: &Benchmark, cfg: &SparseHoConfig) -> Result<Vec<f64>> {
    match &cfg.init {
        Some(z) => Ok(bench.from_search_space(z)?.values),
        None => Ok(vec![bench.default_lambda(); bench.d()]),
    }
}

fn assemble(bench: &Benchmark, traj: Trajectory, iterates: Vec<u64>, tol: f64) -> Result<BaselineResult> {
    let best = traj
        .best()
        .ok_or_else(|| Error::Invalid("no configuration was evaluated".into()))?;
    let best_loss = best.loss;
    let best_lam = bench.from_search_space(&best.z)?.values;
    let refit_beta = refit(bench, &best_lam, tol)?;
    Ok(BaselineResult {
        best_lam,
        best_loss,
        trajectory: traj.into_records(),
        refit_beta,
        iterates,
    })
}

/// Single-start hypergradient descent.
pub fn sparse_ho(bench: &Benchmark, cfg: &SparseHoConfig) -> Result<BaselineResult> {
    sparse_ho_budgeted(bench, cfg, usize::MAX)
}

/// Single-start descent stopped after `max_evals` criterion evaluations.
pub fn sparse_ho_budgeted(bench: &Benchmark, cfg: &SparseHoConfig, max_evals: usize) -> Result<BaselineResult> {
    cfg.validate()?;
    if max_evals == 0 {
        return Err(Error::Invalid("evaluation budget must be at least 1".into()));
    }
    let mut traj = Trajectory::new(0);
    let mut iterates = Vec::new();
    descend(
        bench,
        start_lambda(bench, cfg)?,
        cfg,
        cfg.max_outer_iters,
        max_evals,
        &mut traj,
        &mut iterates,
    )?;
    assemble(bench, traj, iterates, cfg.inner_tol)
}

/// Restarted descent: the first leg starts from `cfg.init`, later legs from
/// a uniform penalty `λ_j ≡ u` with `u ~ U[lam_min, lam_max]`.
pub fn multi_start_sparse_ho(
    bench: &Benchmark,
    cfg: &SparseHoConfig,
    budget: usize,
    seed: u64,
) -> Result<BaselineResult> {
    cfg.validate()?;
    if budget == 0 {
        return Err(Error::Invalid("evaluation budget must be at least 1".into()));
    }
    let (lo, hi) = bench.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = Trajectory::new(seed);
    let mut iterates = Vec::new();
    let mut start = start_lambda(bench, cfg)?;
    while traj.len() < budget {
        let remaining = budget - traj.len();
        let end = descend(bench, start, cfg, cfg.restart_period, remaining, &mut traj, &mut iterates)?;
        if matches!(end, LegEnd::Budget) {
            break;
        }
        let u = rng.random_range(lo..=hi);
        start = vec![u; bench.d()];
    }
    assemble(bench, traj, iterates, cfg.inner_tol)
}
