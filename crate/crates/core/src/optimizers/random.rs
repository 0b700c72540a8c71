use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{run_on_benchmark, AskTell};
use crate::benchmark::Benchmark;
use crate::error::{Error, Result};
use crate::fidelity::Fidelity;
use crate::record::EvalRecord;

/// I.i.d. uniform sampling of `[−1, 1]^d`, one point per batch.
#[derive(Debug, Clone)]
pub struct RandomSearch {
    d: usize,
    rng: ChaCha8Rng,
}

impl RandomSearch {
    pub fn new(d: usize, seed: u64) -> Self {
        RandomSearch {
            d,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self) -> Vec<f64> {
        (0..self.d).map(|_| self.rng.random_range(-1.0..=1.0)).collect()
    }
}

impl AskTell for RandomSearch {
    fn dim(&self) -> usize {
        self.d
    }

    fn ask(&mut self) -> Vec<Vec<f64>> {
        vec![self.sample()]
    }

    fn tell(&mut self, _points: &[Vec<f64>], _losses: &[f64]) -> Result<()> {
        Ok(())
    }
}

pub fn random_search(
    bench: &Benchmark,
    budget: usize,
    fidelity: Fidelity,
    seed: u64,
) -> Result<Vec<EvalRecord>> {
    if budget == 0 {
        return Err(Error::Invalid("budget must be at least 1".into()));
    }
    fidelity.tolerance()?;
    run_on_benchmark(&mut RandomSearch::new(bench.d(), seed), bench, budget, fidelity, seed)
}
