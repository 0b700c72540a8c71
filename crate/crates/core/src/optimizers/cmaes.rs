use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{run_on_benchmark, AskTell};
use crate::benchmark::Benchmark;
use crate::error::{Error, Result};
use crate::fidelity::Fidelity;
use crate::record::EvalRecord;

/// Smallest eigenvalue kept in the covariance.
pub const EIGEN_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CmaConfig {
    pub population: usize,
    pub sigma: f64,
    /// Redraws of an out-of-bounds sample before it is clipped.
    pub max_resamples: usize,
    /// Initial mean in search-space coordinates; the benchmark default if unset.
    pub init: Option<Vec<f64>>,
}

impl Default for CmaConfig {
    fn default() -> Self {
        CmaConfig {
            population: 20,
            sigma: 0.1,
            max_resamples: 10,
            init: None,
        }
    }
}

impl CmaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Invalid("population must be at least 2".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Invalid(format!("sigma = {} must be positive", self.sigma)));
        }
        Ok(())
    }
}

/// (μ/μ_w, λ)-CMA-ES with rank-one and rank-μ updates and cumulative
/// step-size adaptation, confined to `[−1, 1]^d` by resample-then-clip.
#[derive(Debug, Clone)]
pub struct CmaState {
    d: usize,
    lambda: usize,
    max_resamples: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_c: f64,
    c_sigma: f64,
    c_1: f64,
    c_mu: f64,
    d_sigma: f64,
    chi_n: f64,

    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    p_c: DVector<f64>,
    p_sigma: DVector<f64>,
    generation: usize,
    eigen_generation: usize,
    floored: bool,

    rng: ChaCha8Rng,
    pending: Vec<DVector<f64>>,
}

impl CmaState {
    pub fn new(init: &[f64], cfg: &CmaConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let d = init.len();
        if d == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let lambda = cfg.population;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let n = d as f64;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        Ok(CmaState {
            d,
            lambda,
            max_resamples: cfg.max_resamples,
            weights,
            mu_eff,
            c_c,
            c_sigma,
            c_1,
            c_mu,
            d_sigma,
            chi_n,
            mean: DVector::from_column_slice(init),
            sigma: cfg.sigma,
            cov: DMatrix::identity(d, d),
            basis: DMatrix::identity(d, d),
            scales: DVector::from_element(d, 1.0),
            p_c: DVector::zeros(d),
            p_sigma: DVector::zeros(d),
            generation: 0,
            eigen_generation: 0,
            floored: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: Vec::new(),
        })
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> usize {
        self.lambda
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True once any eigenvalue had to be raised to [`EIGEN_FLOOR`].
    pub fn floored(&self) -> bool {
        self.floored
    }

    /// Unclipped samples of the outstanding batch.
    pub fn pending_samples(&self) -> Vec<Vec<f64>> {
        self.pending.iter().map(|v| v.as_slice().to_vec()).collect()
    }

    /// Smallest eigenvalue of the current covariance, computed afresh.
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.cov.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    fn draw(&mut self) -> DVector<f64> {
        let z = DVector::from_fn(self.d, |_, _| StandardNormal.sample(&mut self.rng));
        let y = &self.basis * z.component_mul(&self.scales);
        &self.mean + y * self.sigma
    }

    fn refresh_eigen(&mut self) {
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut vals = eig.eigenvalues;
        for v in vals.iter_mut() {
            if v.is_nan() || *v < EIGEN_FLOOR {
                *v = EIGEN_FLOOR;
                self.floored = true;
            }
        }
        let basis = eig.eigenvectors;
        self.cov = &basis * DMatrix::from_diagonal(&vals) * basis.transpose();
        self.scales = vals.map(f64::sqrt);
        self.basis = basis;
        self.eigen_generation = self.generation;
    }
}

impl AskTell for CmaState {
    fn dim(&self) -> usize {
        self.d
    }

    fn ask(&mut self) -> Vec<Vec<f64>> {
        let lag = self.lambda as f64 / ((self.c_1 + self.c_mu) * self.d as f64 * 10.0);
        if (self.generation - self.eigen_generation) as f64 > lag {
            self.refresh_eigen();
        }
        self.pending.clear();
        let mut out = Vec::with_capacity(self.lambda);
        for _ in 0..self.lambda {
            let mut x = self.draw();
            let mut tries = 0;
            while tries < self.max_resamples && x.iter().any(|v| v.abs() > 1.0) {
                x = self.draw();
                tries += 1;
            }
            out.push(x.iter().map(|v| v.clamp(-1.0, 1.0)).collect());
            self.pending.push(x);
        }
        out
    }

    fn tell(&mut self, points: &[Vec<f64>], losses: &[f64]) -> Result<()> {
        if self.pending.len() != self.lambda || points.len() != self.lambda {
            return Err(Error::Invalid("tell does not match the outstanding batch".into()));
        }
        crate::error::check_len("losses", self.lambda, losses.len())?;
        if let Some(bad) = losses.iter().find(|l| l.is_nan()) {
            return Err(Error::NonFinite(format!("loss {bad}")));
        }
        let mut order: Vec<usize> = (0..self.lambda).collect();
        order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));

        let old_mean = self.mean.clone();
        let steps: Vec<DVector<f64>> = order[..self.weights.len()]
            .iter()
            .map(|&i| (&self.pending[i] - &old_mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(self.d);
        for (w, y) in self.weights.iter().zip(&steps) {
            y_w.axpy(*w, y, 1.0);
        }
        self.mean = &old_mean + &y_w * self.sigma;

        // C^{-1/2} y_w through the cached eigenbasis.
        let inv_scaled = (self.basis.transpose() * &y_w).component_div(&self.scales);
        let whitened = &self.basis * inv_scaled;
        let cs = self.c_sigma;
        self.p_sigma = &self.p_sigma * (1.0 - cs) + whitened * (cs * (2.0 - cs) * self.mu_eff).sqrt();

        let gen = (self.generation + 1) as f64;
        let ps_norm = self.p_sigma.norm();
        let h_sigma = ps_norm / (1.0 - (1.0 - cs).powf(2.0 * gen)).sqrt()
            < (1.4 + 2.0 / (self.d as f64 + 1.0)) * self.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };
        let cc = self.c_c;
        self.p_c = &self.p_c * (1.0 - cc) + &y_w * (h * (cc * (2.0 - cc) * self.mu_eff).sqrt());

        let decay = 1.0 - self.c_1 - self.c_mu + (1.0 - h) * self.c_1 * cc * (2.0 - cc);
        let mut cov = &self.cov * decay;
        cov.ger(self.c_1, &self.p_c, &self.p_c, 1.0);
        for (w, y) in self.weights.iter().zip(&steps) {
            cov.ger(self.c_mu * w, y, y, 1.0);
        }
        self.cov = cov;

        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Degenerate(format!("step size became {}", self.sigma)));
        }
        self.generation += 1;
        self.pending.clear();
        Ok(())
    }
}

pub fn cmaes(bench: &Benchmark, budget: usize, cfg: &CmaConfig, seed: u64) -> Result<Vec<EvalRecord>> {
    cfg.validate()?;
    if budget < cfg.population {
        return Err(Error::Invalid(format!(
            "budget {budget} is below the population {}",
            cfg.population
        )));
    }
    let init = match &cfg.init {
        Some(z) => {
            crate::error::check_len("init", bench.d(), z.len())?;
            z.clone()
        }
        None => bench.default_init(),
    };
    let mut state = CmaState::new(&init, cfg, seed)?;
    run_on_benchmark(&mut state, bench, budget, Fidelity::HIGHEST, seed)
}
