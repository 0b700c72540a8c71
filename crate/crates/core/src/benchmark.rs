//! A reproducible HPO problem: data, bounds, criterion and fidelities.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchgen::{compute_bounds, make_synthetic_data, BoundsKind, SyntheticSpec};
use crate::criteria::{CriterionValue, CvConfig, CvEvaluation, CvProblem};
use crate::error::{check_len, Error, Result};
use crate::fidelity::{Fidelity, FidelitySchedule};
use crate::ingest::{load_real_dataset, registry_entry, DatasetRegistryEntry};
use crate::lasso::{Dataset, PenaltyVector};

/// Reference losses below this disable scaling.
pub const MIN_REFERENCE_LOSS: f64 = 1e-12;

/// Where a benchmark's data comes from. Serialized with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchmarkSource {
    Synthetic(SyntheticSpec),
    Real(DatasetRegistryEntry),
    /// In-memory data; cannot be regenerated from a manifest.
    Custom { bounds_kind: BoundsKind },
}

/// JSON description sufficient to rebuild a benchmark bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub name: String,
    #[serde(flatten)]
    pub source: BenchmarkSource,
    pub lam_min: f64,
    pub lam_max: f64,
    pub criterion: CvConfig,
    pub fidelity: FidelitySchedule,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    name: String,
    source: BenchmarkSource,
    dataset: Dataset,
    lam_min: f64,
    lam_max: f64,
    beta_true: Option<Vec<f64>>,
    criterion: CvConfig,
    fidelity: FidelitySchedule,
    cv: CvProblem,
    reference: Option<f64>,
}

/// A point mapped between λ-space and the `[−1, 1]^d` search space.
#[derive(Debug, Clone, PartialEq)]
pub struct Mapped {
    pub values: Vec<f64>,
    /// Whether any input coordinate was outside its range and got clipped.
    pub clipped: bool,
}

/// Criterion value plus the clip flag of the search-space point.
#[derive(Debug, Clone)]
pub struct PointEvaluation {
    pub value: CriterionValue,
    pub lam: Vec<f64>,
    pub clipped: bool,
    pub tol: f64,
}

impl Benchmark {
    /// Wraps a dataset with bounds of the given kind and default CV settings.
    pub fn from_dataset(
        name: impl Into<String>,
        dataset: Dataset,
        bounds_kind: BoundsKind,
        beta_true: Option<Vec<f64>>,
        criterion: CvConfig,
    ) -> Result<Self> {
        Self::assemble(
            name.into(),
            BenchmarkSource::Custom { bounds_kind },
            dataset,
            bounds_kind,
            beta_true,
            criterion,
        )
    }

    fn assemble(
        name: String,
        source: BenchmarkSource,
        dataset: Dataset,
        bounds_kind: BoundsKind,
        beta_true: Option<Vec<f64>>,
        criterion: CvConfig,
    ) -> Result<Self> {
        if let Some(b) = &beta_true {
            check_len("beta_true", dataset.d(), b.len())?;
        }
        let (lam_min, lam_max) = compute_bounds(&dataset, bounds_kind)?;
        let cv = CvProblem::new(&dataset, &criterion)?;
        let reference = match &beta_true {
            Some(b) => Some(cv.evaluate_fixed(b)?.loss),
            None => None,
        };
        Ok(Benchmark {
            name,
            source,
            dataset,
            lam_min,
            lam_max,
            beta_true,
            criterion,
            fidelity: FidelitySchedule::default(),
            cv,
            reference,
        })
    }

    /// Generates a synthetic benchmark.
    pub fn synthetic(name: impl Into<String>, spec: &SyntheticSpec) -> Result<Self> {
        let name = name.into();
        let data = make_synthetic_data(spec, &name)?;
        Self::assemble(
            name,
            BenchmarkSource::Synthetic(spec.clone()),
            data.dataset,
            BoundsKind::Synthetic,
            Some(data.beta_true),
            CvConfig::default(),
        )
    }

    /// One of the named synthetic presets (see [`SyntheticSpec::preset`]).
    pub fn preset(name: &str) -> Result<Self> {
        Self::synthetic(name, &SyntheticSpec::preset(name)?)
    }

    pub fn real(entry: &DatasetRegistryEntry, data_dir: Option<&Path>) -> Result<Self> {
        let dataset = load_real_dataset(entry, data_dir)?;
        Self::assemble(
            entry.name.clone(),
            BenchmarkSource::Real(entry.clone()),
            dataset,
            entry.bounds_kind,
            None,
            CvConfig::default(),
        )
    }

    /// Resolves a synthetic preset name or a registered real dataset name.
    pub fn by_name(name: &str, data_dir: Option<&Path>) -> Result<Self> {
        match SyntheticSpec::preset(name) {
            Ok(spec) => Self::synthetic(name, &spec),
            Err(_) => Self::real(&registry_entry(name)?, data_dir),
        }
    }

    pub fn manifest(&self) -> BenchmarkManifest {
        BenchmarkManifest {
            name: self.name.clone(),
            source: self.source.clone(),
            lam_min: self.lam_min,
            lam_max: self.lam_max,
            criterion: self.criterion.clone(),
            fidelity: self.fidelity.clone(),
        }
    }

    /// Rebuilds a benchmark and checks its bounds against the manifest.
    pub fn from_manifest(m: &BenchmarkManifest, data_dir: Option<&Path>) -> Result<Self> {
        let (dataset, kind, beta_true) = match &m.source {
            BenchmarkSource::Synthetic(spec) => {
                let data = make_synthetic_data(spec, &m.name)?;
                (data.dataset, BoundsKind::Synthetic, Some(data.beta_true))
            }
            BenchmarkSource::Real(entry) => {
                (load_real_dataset(entry, data_dir)?, entry.bounds_kind, None)
            }
            BenchmarkSource::Custom { .. } => {
                return Err(Error::Invalid(format!(
                    "benchmark {} was built from in-memory data and cannot be regenerated",
                    m.name
                )))
            }
        };
        let mut b = Self::assemble(
            m.name.clone(),
            m.source.clone(),
            dataset,
            kind,
            beta_true,
            m.criterion.clone(),
        )?;
        if b.lam_min != m.lam_min || b.lam_max != m.lam_max {
            return Err(Error::Invalid(format!(
                "manifest bounds ({}, {}) differ from regenerated bounds ({}, {})",
                m.lam_min, m.lam_max, b.lam_min, b.lam_max
            )));
        }
        b.fidelity = m.fidelity.clone();
        Ok(b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &BenchmarkSource {
        &self.source
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn d(&self) -> usize {
        self.dataset.d()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lam_min, self.lam_max)
    }

    pub fn beta_true(&self) -> Option<&[f64]> {
        self.beta_true.as_deref()
    }

    pub fn criterion(&self) -> &CvConfig {
        &self.criterion
    }

    pub fn fidelity(&self) -> &FidelitySchedule {
        &self.fidelity
    }

    pub fn cv(&self) -> &CvProblem {
        &self.cv
    }

    /// CV MSE of `β_true` used directly as the predictor on every fold.
    pub fn reference_loss(&self) -> Result<f64> {
        self.reference.ok_or_else(|| {
            Error::Invalid(format!("benchmark {} has no ground-truth coefficients", self.name))
        })
    }

    /// `raw / reference_loss`, or `None` without a usable reference.
    pub fn scale(&self, raw: f64) -> Option<f64> {
        self.reference
            .filter(|r| *r >= MIN_REFERENCE_LOSS)
            .map(|r| raw / r)
    }

    fn finish(&self, mut eval: CvEvaluation) -> CvEvaluation {
        eval.value.scaled = self.scale(eval.value.loss);
        eval
    }

    /// Criterion at `lam` with inner tolerance `tol`.
    pub fn evaluate(&self, lam: &[f64], tol: f64) -> Result<CvEvaluation> {
        self.evaluate_warm(lam, tol, None)
    }

    pub fn evaluate_warm(
        &self,
        lam: &[f64],
        tol: f64,
        warm: Option<&[Vec<f64>]>,
    ) -> Result<CvEvaluation> {
        let pv = PenaltyVector::new(lam.to_vec())?;
        Ok(self.finish(self.cv.evaluate(&pv, tol, warm)?))
    }

    /// Criterion with every fold predicted by a fixed `beta` (no solve).
    pub fn evaluate_fixed(&self, beta: &[f64]) -> Result<CriterionValue> {
        let mut v = self.cv.evaluate_fixed(beta)?;
        v.scaled = self.scale(v.loss);
        Ok(v)
    }

    /// Maps a search-space point to λ and evaluates it at `fidelity`.
    pub fn evaluate_point(&self, z: &[f64], fidelity: Fidelity) -> Result<PointEvaluation> {
        self.evaluate_point_warm(z, fidelity, None).map(|(p, _)| p)
    }

    /// Like [`evaluate_point`](Self::evaluate_point), also returning the fold solutions.
    pub fn evaluate_point_warm(
        &self,
        z: &[f64],
        fidelity: Fidelity,
        warm: Option<&[Vec<f64>]>,
    ) -> Result<(PointEvaluation, Vec<Vec<f64>>)> {
        let tol = fidelity.tolerance()?;
        let mapped = self.from_search_space(z)?;
        let eval = self.evaluate_warm(&mapped.values, tol, warm)?;
        let betas = eval.solutions.into_iter().map(|s| s.beta).collect();
        Ok((
            PointEvaluation {
                value: eval.value,
                lam: mapped.values,
                clipped: mapped.clipped,
                tol,
            },
            betas,
        ))
    }

    /// `z = 2 (λ − lam_min)/(lam_max − lam_min) − 1`, clipped to `[−1, 1]`.
    pub fn to_search_space(&self, lam: &[f64]) -> Result<Mapped> {
        check_len("penalty vector", self.d(), lam.len())?;
        let width = self.lam_max - self.lam_min;
        let mut clipped = false;
        let values = lam
            .iter()
            .map(|&l| {
                if !l.is_finite() {
                    return Err(Error::NonFinite("penalty entry".into()));
                }
                let z = 2.0 * (l - self.lam_min) / width - 1.0;
                clipped |= !(-1.0..=1.0).contains(&z);
                Ok(z.clamp(-1.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mapped { values, clipped })
    }

    /// `λ = lam_min + (z + 1)/2 · (lam_max − lam_min)`, with `z` clipped first.
    /// Evaluated as a convex combination so both endpoints map exactly.
    pub fn from_search_space(&self, z: &[f64]) -> Result<Mapped> {
        check_len("search-space point", self.d(), z.len())?;
        let mut clipped = false;
        let values = z
            .iter()
            .map(|&v| {
                if !v.is_finite() {
                    return Err(Error::NonFinite("search-space coordinate".into()));
                }
                clipped |= !(-1.0..=1.0).contains(&v);
                let v = v.clamp(-1.0, 1.0);
                Ok((1.0 - v) / 2.0 * self.lam_min + (1.0 + v) / 2.0 * self.lam_max)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mapped { values, clipped })
    }

    /// Uniform `λ_j = lam_max − log 10`, in search-space coordinates.
    pub fn default_init(&self) -> Vec<f64> {
        let lam = vec![self.default_lambda(); self.d()];
        self.to_search_space(&lam)
            .expect("default penalty lies inside the bounds")
            .values
    }

    pub fn default_lambda(&self) -> f64 {
        self.lam_max - std::f64::consts::LN_10
    }
}
