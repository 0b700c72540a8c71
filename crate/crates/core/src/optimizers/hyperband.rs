use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmark::Benchmark;
use crate::error::{Error, Result};
use crate::fidelity::Fidelity;
use crate::record::{EvalRecord, Trajectory};

/// One successive-halving run: `n` configurations starting at resource `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub s: u32,
    pub n: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperbandPlan {
    pub eta: u64,
    /// Maximum resource; a configuration at `r_max` is solved at full fidelity.
    pub r_max: u64,
    /// Stop once the summed solver cost reaches this many work units.
    pub max_cost: Option<u64>,
    /// Stop after this many evaluations.
    pub max_evals: Option<usize>,
    /// Number of passes over all brackets. Defaults to one pass without a
    /// cap and to unlimited passes with one.
    pub rounds: Option<usize>,
}

impl Default for HyperbandPlan {
    fn default() -> Self {
        HyperbandPlan {
            eta: 3,
            r_max: 27,
            max_cost: None,
            max_evals: None,
            rounds: None,
        }
    }
}

impl HyperbandPlan {
    pub fn validate(&self) -> Result<()> {
        if self.eta < 2 {
            return Err(Error::Invalid(format!("eta = {} must be at least 2", self.eta)));
        }
        if self.r_max < self.eta {
            return Err(Error::Invalid(format!(
                "r_max = {} is below eta = {}",
                self.r_max, self.eta
            )));
        }
        if self.max_evals == Some(0) || self.max_cost == Some(0) {
            return Err(Error::Invalid("caps must be positive".into()));
        }
        if self.rounds == Some(0) {
            return Err(Error::Invalid("rounds must be positive".into()));
        }
        Ok(())
    }

    /// Largest `s` with `eta^s ≤ r_max`.
    pub fn s_max(&self) -> u32 {
        let mut s = 0;
        let mut p = self.eta;
        while p <= self.r_max {
            s += 1;
            p = match p.checked_mul(self.eta) {
                Some(v) => v,
                None => break,
            };
        }
        s
    }

    /// Brackets from the most exploratory (`s = s_max`) down to `s = 0`.
    pub fn brackets(&self) -> Result<Vec<Bracket>> {
        self.validate()?;
        let s_max = self.s_max();
        Ok((0..=s_max)
            .rev()
            .map(|s| {
                let eta_s = self.eta.pow(s);
                let n = ((s_max as u64 + 1) * eta_s).div_ceil(s as u64 + 1) as usize;
                Bracket {
                    s,
                    n,
                    r: self.r_max as f64 / eta_s as f64,
                }
            })
            .collect())
    }

    /// Continuous fidelity `ln r / ln r_max` of a resource level.
    pub fn fidelity(&self, r: f64) -> Fidelity {
        let l = (r.ln() / (self.r_max as f64).ln()).clamp(0.0, 1.0);
        Fidelity::Continuous(l)
    }
}

struct Candidate {
    z: Vec<f64>,
    warm: Option<Vec<Vec<f64>>>,
}

/// Hyperband over tolerance fidelities. Each surviving configuration is
/// warm-started from its own fold solutions at the previous rung.
pub fn hyperband(bench: &Benchmark, plan: &HyperbandPlan, seed: u64) -> Result<Vec<EvalRecord>> {
    let brackets = plan.brackets()?;
    let capped = plan.max_cost.is_some() || plan.max_evals.is_some();
    let rounds = match plan.rounds {
        Some(r) => r,
        None if capped => usize::MAX,
        None => 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = Trajectory::new(seed);
    let d = bench.d();
    let exhausted = |t: &Trajectory| {
        plan.max_cost.is_some_and(|c| t.total_cost() >= c) || plan.max_evals.is_some_and(|m| t.len() >= m)
    };

    for round in 0..rounds {
        for (b, bracket) in brackets.iter().enumerate() {
            let mut pool: Vec<Candidate> = (0..bracket.n)
                .map(|i| Candidate {
                    z: if round == 0 && b == 0 && i == 0 {
                        bench.default_init()
                    } else {
                        (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()
                    },
                    warm: None,
                })
                .collect();
            for rung in 0..=bracket.s {
                let r = bracket.r * (plan.eta as f64).powi(rung as i32);
                let fidelity = plan.fidelity(r);
                let mut losses = Vec::with_capacity(pool.len());
                for cand in pool.iter_mut() {
                    if exhausted(&traj) {
                        return Ok(traj.into_records());
                    }
                    let (eval, betas) =
                        bench.evaluate_point_warm(&cand.z, fidelity, cand.warm.as_deref())?;
                    losses.push(traj.push(cand.z.clone(), fidelity, &eval).loss);
                    cand.warm = Some(betas);
                }
                let keep = pool.len() / plan.eta as usize;
                let mut order: Vec<usize> = (0..pool.len()).collect();
                order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));
                let mut slots: Vec<Option<Candidate>> = pool.into_iter().map(Some).collect();
                pool = order[..keep].iter().map(|&i| slots[i].take().unwrap()).collect();
                if pool.is_empty() {
                    break;
                }
            }
        }
        if exhausted(&traj) {
            break;
        }
    }
    Ok(traj.into_records())
}
