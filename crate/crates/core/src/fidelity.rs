//! Fidelities: inner-solver tolerances, discrete or continuous.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances of the five discrete levels, cheapest first.
pub const DISCRETE_TOLERANCES: [f64; 5] = [0.2, 1e-1, 1e-2, 1e-3, 1e-4];

/// Tolerance range spanned by the continuous fidelity `l ∈ [0, 1]`.
pub const CONTINUOUS_RANGE: (f64, f64) = (0.2, 1e-4);

pub const HIGHEST_LEVEL: u8 = 4;

/// Serializes as `{"discrete": 3}` or `{"continuous": 0.7}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    Discrete(u8),
    Continuous(f64),
}

impl Fidelity {
    pub const HIGHEST: Fidelity = Fidelity::Discrete(HIGHEST_LEVEL);

    pub fn tolerance(&self) -> Result<f64> {
        fidelity_from_resource(*self)
    }
}

impl Default for Fidelity {
    fn default() -> Self {
        Fidelity::HIGHEST
    }
}

/// Maps a fidelity to its coordinate-descent tolerance.
///
/// Continuous levels interpolate log-linearly between 0.2 (`l = 0`) and
/// 1e-4 (`l = 1`).
pub fn fidelity_from_resource(level: Fidelity) -> Result<f64> {
    match level {
        Fidelity::Discrete(l) => DISCRETE_TOLERANCES
            .get(l as usize)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("discrete fidelity {l} outside 0..=4"))),
        Fidelity::Continuous(l) => {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::Invalid(format!("continuous fidelity {l} outside [0, 1]")));
            }
            if l == 1.0 {
                return Ok(CONTINUOUS_RANGE.1);
            }
            if l == 0.0 {
                return Ok(CONTINUOUS_RANGE.0);
            }
            let (lo, hi) = (CONTINUOUS_RANGE.0.ln(), CONTINUOUS_RANGE.1.ln());
            Ok(((1.0 - l) * lo + l * hi).exp())
        }
    }
}

/// Fidelity metadata attached to a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySchedule {
    pub discrete: Vec<f64>,
    pub continuous: [f64; 2],
    /// Fidelity used when a request does not name one.
    pub default: Fidelity,
}

impl Default for FidelitySchedule {
    fn default() -> Self {
        FidelitySchedule {
            discrete: DISCRETE_TOLERANCES.to_vec(),
            continuous: [CONTINUOUS_RANGE.0, CONTINUOUS_RANGE.1],
            default: Fidelity::HIGHEST,
        }
    }
}
