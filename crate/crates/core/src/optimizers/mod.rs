//! Sampling-based optimizers over the `[−1, 1]^d` search space.

mod cmaes;
mod hyperband;
mod random;

pub use self::cmaes::{cmaes, CmaConfig, CmaState};
pub use self::hyperband::{hyperband, Bracket, HyperbandPlan};
pub use self::random::{random_search, RandomSearch};
pub use crate::fidelity::{fidelity_from_resource, Fidelity};

use crate::benchmark::Benchmark;
use crate::error::Result;
use crate::record::{EvalRecord, Trajectory};

/// Batch ask/tell interface shared by the population-based optimizers.
pub trait AskTell {
    fn dim(&self) -> usize;

    /// Next batch of points, each inside `[−1, 1]^d`.
    fn ask(&mut self) -> Vec<Vec<f64>>;

    /// Reports the losses of the most recent batch, in ask order.
    fn tell(&mut self, points: &[Vec<f64>], losses: &[f64]) -> Result<()>;
}

/// Drives an optimizer on an arbitrary objective for at most `budget`
/// evaluations. A final batch that does not fit is evaluated partially and
/// not told.
pub fn minimize<O, F>(opt: &mut O, budget: usize, mut f: F) -> Result<Vec<(Vec<f64>, f64)>>
where
    O: AskTell + ?Sized,
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut history = Vec::with_capacity(budget);
    while history.len() < budget {
        let batch = opt.ask();
        let room = budget - history.len();
        let mut losses = Vec::with_capacity(batch.len());
        for p in batch.iter().take(room) {
            let l = f(p)?;
            losses.push(l);
            history.push((p.clone(), l));
        }
        if losses.len() < batch.len() {
            break;
        }
        opt.tell(&batch, &losses)?;
    }
    Ok(history)
}

/// Runs an optimizer against a benchmark at a fixed fidelity.
pub fn run_on_benchmark<O: AskTell + ?Sized>(
    opt: &mut O,
    bench: &Benchmark,
    budget: usize,
    fidelity: Fidelity,
    seed: u64,
) -> Result<Vec<EvalRecord>> {
    let mut traj = Trajectory::new(seed);
    minimize(opt, budget, |z| {
        let eval = bench.evaluate_point(z, fidelity)?;
        Ok(traj.push(z.to_vec(), fidelity, &eval).loss)
    })?;
    Ok(traj.into_records())
}
