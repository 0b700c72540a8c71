//! Synthetic benchmark generation and search-space bounds.
//!
//! Designs are drawn row-wise from `N(0, Σ)` with `Σ_ij = ρ^|i−j|` using the
//! AR(1) recursion across columns. All randomness comes from ChaCha8 with a
//! fixed stream per quantity, so a spec reproduces bit-identical data on any
//! platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lasso::Dataset;

/// ChaCha stream feeding the design matrix.
pub const STREAM_DESIGN: u64 = 0;
/// ChaCha stream feeding the noise vector.
pub const STREAM_NOISE: u64 = 1;

pub const DEFAULT_RHO: f64 = 0.6;
pub const DEFAULT_SEED: u64 = 42;
pub const SNR_NOISELESS: f64 = 10.0;
pub const SNR_NOISY: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub d_e: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, d: usize, d_e: usize) -> Self {
        SyntheticSpec {
            n,
            d,
            d_e,
            rho: DEFAULT_RHO,
            snr: SNR_NOISELESS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn noisy(mut self) -> Self {
        self.snr = SNR_NOISY;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Looks up a preset by name. Names are `synt_simple`, `synt_medium`,
    /// `synt_high` and `synt_hard`, each optionally suffixed with `_noisy`.
    pub fn preset(name: &str) -> Result<Self> {
        let (base, noisy) = match name.strip_suffix("_noisy") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let spec = match base {
            "synt_simple" => SyntheticSpec::new(30, 60, 3),
            "synt_medium" => SyntheticSpec::new(50, 100, 5),
            "synt_high" => SyntheticSpec::new(150, 300, 15),
            "synt_hard" => SyntheticSpec::new(500, 1000, 50),
            _ => {
                return Err(Error::Unknown {
                    kind: "preset",
                    name: name.to_string(),
                })
            }
        };
        Ok(if noisy { spec.noisy() } else { spec })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Invalid("n and d must be positive".into()));
        }
        if self.d_e == 0 || self.d_e > self.d {
            return Err(Error::Invalid(format!("d_e = {} outside 1..={}", self.d_e, self.d)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Invalid(format!("rho = {} outside [0, 1)", self.rho)));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(Error::Invalid(format!("snr = {} must be positive", self.snr)));
        }
        Ok(())
    }
}

pub const PRESET_NAMES: [&str; 4] = ["synt_simple", "synt_medium", "synt_high", "synt_hard"];

/// Raw output of the generator.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub beta_true: Vec<f64>,
    pub noise: Vec<f64>,
}

/// Support and values of the ground-truth coefficients.
///
/// Nonzeros sit at `k * ⌊d/d_e⌋` for `k = 0..d_e`; their magnitudes are
/// `(k+1)/d_e` with alternating sign, so they spread over `[−1, 1]` without 0.
pub fn ground_truth(d: usize, d_e: usize) -> Vec<f64> {
    let step = d / d_e;
    let mut beta = vec![0.0; d];
    for k in 0..d_e {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        beta[k * step] = sign * (k + 1) as f64 / d_e as f64;
    }
    beta
}

/// AR(1) correlated Gaussian design, column-major.
pub fn ar1_design(n: usize, d: usize, rho: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_DESIGN);
    let innov = (1.0 - rho * rho).sqrt();
    let mut data = Vec::with_capacity(n * d);
    for j in 0..d {
        for i in 0..n {
            let e: f64 = StandardNormal.sample(&mut rng);
            let v = if j == 0 {
                e
            } else {
                rho * data[(j - 1) * n + i] + innov * e
            };
            data.push(v);
        }
    }
    data
}

pub fn make_synthetic_data(spec: &SyntheticSpec, name: &str) -> Result<SyntheticData> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let design = ar1_design(n, d, spec.rho, spec.seed);
    let beta_true = ground_truth(d, spec.d_e);
    let noiseless = Dataset::from_dense_columns(name, n, d, design, vec![0.0; n])?;
    let signal = noiseless.matvec(&beta_true)?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(STREAM_NOISE);
    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let signal_norm = norm(&signal);
    let g_norm = norm(&g);
    if g_norm == 0.0 || signal_norm == 0.0 {
        return Err(Error::Degenerate("zero signal or zero noise draw".into()));
    }
    let factor = signal_norm / (spec.snr * g_norm);
    let noise: Vec<f64> = g.iter().map(|v| v * factor).collect();
    let y = signal.iter().zip(&noise).map(|(s, e)| s + e).collect();
    Ok(SyntheticData {
        dataset: noiseless.with_target(y)?,
        beta_true,
        noise,
    })
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsKind {
    Synthetic,
    Real,
    Rcv1Like,
}

impl BoundsKind {
    /// Width of `[lam_min, lam_max]` in natural-log units.
    pub fn span(&self) -> f64 {
        let decades = match self {
            BoundsKind::Synthetic => 2.0,
            BoundsKind::Real => 5.0,
            BoundsKind::Rcv1Like => 3.0,
        };
        decades * std::f64::consts::LN_10
    }
}

/// `log(max_j |x_jᵀy| / n)`, rounded up to the smallest float at which the
/// all-zero vector is a coordinate-descent fixed point.
pub fn compute_lambda_max(ds: &Dataset) -> Result<f64> {
    let n = ds.n() as f64;
    let max_abs = (0..ds.d())
        .map(|j| ds.col_dot(j, ds.y()).abs())
        .fold(0.0_f64, f64::max);
    if max_abs == 0.0 {
        return Err(Error::Degenerate("Xᵀy is identically zero".into()));
    }
    let mut lam = (max_abs / n).ln();
    while n * lam.exp() < max_abs {
        lam = lam.next_up();
    }
    Ok(lam)
}

pub fn bounds_from_lambda_max(lam_max: f64, kind: BoundsKind) -> (f64, f64) {
    (lam_max - kind.span(), lam_max)
}

/// `(lam_min, lam_max)` for a dataset.
pub fn compute_bounds(ds: &Dataset, kind: BoundsKind) -> Result<(f64, f64)> {
    Ok(bounds_from_lambda_max(compute_lambda_max(ds)?, kind))
}
