use serde::{Deserialize, Serialize};

use crate::baselines::{sparse_ho_budgeted, SparseHoConfig};
use crate::benchmark::Benchmark;
use crate::error::{Error, Result};
use crate::fidelity::{Fidelity, DISCRETE_TOLERANCES};
use crate::optimizers::RandomSearch;

const LEVELS: usize = DISCRETE_TOLERANCES.len();

/// Pearson correlation of losses between every pair of discrete fidelity
/// levels. `None` marks a pair involving a constant loss column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub levels: Vec<f64>,
    pub matrix: Vec<Vec<Option<f64>>>,
    /// `losses[probe][level]`
    pub losses: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.matrix[a][b]
    }
}

/// Sample Pearson correlation; `None` if either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Evaluates `n_probes` uniform configurations at all discrete levels.
pub fn fidelity_correlation(bench: &Benchmark, n_probes: usize, seed: u64) -> Result<CorrelationMatrix> {
    if n_probes < 3 {
        return Err(Error::Invalid(format!("need at least 3 probes, got {n_probes}")));
    }
    let mut sampler = RandomSearch::new(bench.d(), seed);
    let mut losses = Vec::with_capacity(n_probes);
    for _ in 0..n_probes {
        let z = sampler.sample();
        let row = (0..LEVELS as u8)
            .map(|l| bench.evaluate_point(&z, Fidelity::Discrete(l)).map(|e| e.value.objective()))
            .collect::<Result<Vec<f64>>>()?;
        losses.push(row);
    }
    let columns: Vec<Vec<f64>> = (0..LEVELS)
        .map(|l| losses.iter().map(|row| row[l]).collect())
        .collect();
    let mut matrix = vec![vec![None; LEVELS]; LEVELS];
    for a in 0..LEVELS {
        for b in a..LEVELS {
            let c = if a == b {
                pearson(&columns[a], &columns[a]).map(|_| 1.0)
            } else {
                pearson(&columns[a], &columns[b])
            };
            matrix[a][b] = c;
            matrix[b][a] = c;
        }
    }
    Ok(CorrelationMatrix {
        levels: DISCRETE_TOLERANCES.to_vec(),
        matrix,
        losses,
    })
}

/// Mean solver cost of one full-fidelity evaluation at uniform random
/// configurations. Dividing a cost total by this gives equivalent
/// full-fidelity evaluations.
pub fn mean_highest_fidelity_cost(bench: &Benchmark, n_probes: usize, seed: u64) -> Result<f64> {
    if n_probes == 0 {
        return Err(Error::Invalid("need at least one probe".into()));
    }
    let mut sampler = RandomSearch::new(bench.d(), seed);
    let mut total = 0u64;
    for _ in 0..n_probes {
        total += bench.evaluate_point(&sampler.sample(), Fidelity::HIGHEST)?.value.cost;
    }
    Ok(total as f64 / n_probes as f64)
}

/// `‖β̂‖₀` of the full-data refit at the best penalty found by
/// hypergradient descent within `budget` evaluations.
pub fn estimate_effective_dim(bench: &Benchmark, budget: usize) -> Result<usize> {
    if budget == 0 {
        return Err(Error::Invalid("budget must be at least 1".into()));
    }
    Ok(sparse_ho_budgeted(bench, &SparseHoConfig::default(), budget)?.support_size())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_cases() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]), None);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }
}
