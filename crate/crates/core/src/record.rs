//! Trajectory rows shared by baselines, optimizers and the harness.

use std::cell::Cell;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::benchmark::PointEvaluation;
use crate::fidelity::Fidelity;

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    /// Search-space point in `[−1, 1]^d`.
    pub z: Vec<f64>,
    pub fidelity: Fidelity,
    /// Scaled loss when the benchmark has a reference, raw loss otherwise.
    pub loss: f64,
    pub raw_loss: f64,
    pub cost_units: u64,
    /// Nanoseconds since the trajectory started; zero unless wall-time
    /// recording was enabled with [`record_wall_time`].
    pub wall_ns: u64,
    pub seed: u64,
    pub ordinal: u64,
}

thread_local! {
    static WALL_CLOCK: Cell<bool> = const { Cell::new(false) };
}

/// Restores the previous wall-clock setting when dropped.
#[derive(Debug)]
pub struct WallClockGuard {
    previous: bool,
}

impl Drop for WallClockGuard {
    fn drop(&mut self) {
        WALL_CLOCK.with(|c| c.set(self.previous));
    }
}

/// Turns wall-time stamping on or off for trajectories created on this
/// thread while the guard lives.
pub fn record_wall_time(on: bool) -> WallClockGuard {
    WallClockGuard {
        previous: WALL_CLOCK.with(|c| c.replace(on)),
    }
}

/// Appends records with consecutive ordinals.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    records: Vec<EvalRecord>,
    seed: u64,
    started: Option<Instant>,
}

impl Trajectory {
    pub fn new(seed: u64) -> Self {
        Trajectory {
            records: Vec::new(),
            seed,
            started: WALL_CLOCK.with(|c| c.get()).then(Instant::now),
        }
    }

    pub fn push(&mut self, z: Vec<f64>, fidelity: Fidelity, eval: &PointEvaluation) -> &EvalRecord {
        self.push_values(z, fidelity, eval.value.objective(), eval.value.loss, eval.value.cost)
    }

    pub fn push_values(
        &mut self,
        z: Vec<f64>,
        fidelity: Fidelity,
        loss: f64,
        raw_loss: f64,
        cost_units: u64,
    ) -> &EvalRecord {
        let ordinal = self.records.len() as u64;
        let wall_ns = self.started.map_or(0, |t| t.elapsed().as_nanos() as u64);
        self.records.push(EvalRecord {
            z,
            fidelity,
            loss,
            raw_loss,
            cost_units,
            wall_ns,
            seed: self.seed,
            ordinal,
        });
        self.records.last().expect("just pushed")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<EvalRecord> {
        self.records
    }

    pub fn last_mut(&mut self) -> Option<&mut EvalRecord> {
        self.records.last_mut()
    }

    /// Index of the lowest loss; earliest wins ties.
    pub fn best(&self) -> Option<&EvalRecord> {
        best_record(&self.records)
    }

    pub fn total_cost(&self) -> u64 {
        self.records.iter().map(|r| r.cost_units).sum()
    }
}

pub fn best_record(records: &[EvalRecord]) -> Option<&EvalRecord> {
    records
        .iter()
        .fold(None, |best: Option<&EvalRecord>, r| match best {
            Some(b) if b.loss <= r.loss => Some(b),
            _ => Some(r),
        })
}

/// Running minimum of the losses.
pub fn best_so_far(records: &[EvalRecord]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    records
        .iter()
        .map(|r| {
            best = best.min(r.loss);
            best
        })
        .collect()
}
