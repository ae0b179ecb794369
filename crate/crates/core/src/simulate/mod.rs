//! Discrete-event Monte Carlo for both models, used as an independent check
//! on the analytic solutions.
//!
//! Every replication draws from its own ChaCha8 stream (master seed, stream =
//! replication index), and per-replication results are reduced in index
//! order, so estimates are bit-identical whether replications ran in parallel
//! or not.

mod bankruptcy;
mod workload;

pub use bankruptcy::{lundberg_coefficient, simulate_bankruptcy, survival_threshold, BankruptcyEstimate};
pub use workload::{simulate_workload, DensityEstimate, Histogram};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::exec::ExecMode;

/// Clearing (queue) or bankruptcy (insurance) rate as a function of the
/// inventory / negative-surplus level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RateSpec {
    Constant { omega: f64 },
    Linear { a: f64 },
}

impl RateSpec {
    pub fn rate(&self, level: f64) -> f64 {
        match *self {
            RateSpec::Constant { omega } => omega,
            RateSpec::Linear { a } => a * level,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        let (name, v) = match *self {
            RateSpec::Constant { omega } => ("omega", omega),
            RateSpec::Linear { a } => ("a", a),
        };
        crate::error::require_positive(name, v).map(|_| ())
    }

    /// Time until the next clearing from inventory `level`, which grows at
    /// unit rate: solves `∫_0^τ ω(level + t) dt = e`.
    fn clearing_time(&self, level: f64, e: f64) -> f64 {
        match *self {
            RateSpec::Constant { omega } => e / omega,
            RateSpec::Linear { a } => -level + (level * level + 2.0 * e / a).sqrt(),
        }
    }

    /// Time until bankruptcy from negative surplus `−level` recovering at rate
    /// `c`; infinite if the surplus gets back to zero first.
    fn bankruptcy_time(&self, level: f64, c: f64, e: f64) -> f64 {
        match *self {
            RateSpec::Constant { omega } => e / omega,
            RateSpec::Linear { a } => {
                let cap = a * level * level / (2.0 * c);
                if e <= cap {
                    let disc = (level * level - 2.0 * c * e / a).max(0.0);
                    // Rationalised form of (level − √disc)/c, stable for small e.
                    2.0 * e / (a * (level + disc.sqrt()))
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: usize,
    /// Simulated time per replication, burn-in included.
    pub time: f64,
    pub burn_in: f64,
    pub bin_width: f64,
    /// Histogram range for the inventory level.
    pub x_max_neg: f64,
    /// Histogram range for the workload.
    pub x_max_pos: f64,
    /// Total number of surplus paths (insurance), split over replications.
    pub paths: u64,
    /// Survival threshold `M`; derived from `tail_tol` when absent.
    pub threshold: Option<f64>,
    /// Bound on the classical ruin probability from `M`.
    pub tail_tol: f64,
    pub exec: ExecMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            replications: 16,
            time: 1e5,
            burn_in: 100.0,
            bin_width: 0.05,
            x_max_neg: 10.0,
            x_max_pos: 10.0,
            paths: 100_000,
            threshold: None,
            tail_tol: 1e-6,
            exec: ExecMode::Parallel,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: String| Err(SolveError::InvalidParameter(m));
        if self.replications < 2 {
            return bad("at least 2 replications are needed for standard errors".into());
        }
        if !(self.time > 0.0 && self.time.is_finite()) {
            return bad(format!("time must be positive, got {}", self.time));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.time) {
            return bad(format!("burn-in {} must lie in [0, time)", self.burn_in));
        }
        if !(self.bin_width > 0.0) {
            return bad(format!("bin width must be positive, got {}", self.bin_width));
        }
        if !(self.x_max_neg > 0.0 && self.x_max_pos > 0.0) {
            return bad("histogram ranges must be positive".into());
        }
        if let Some(m) = self.threshold {
            if !(m > 0.0 && m.is_finite()) {
                return bad(format!("survival threshold must be positive, got {m}"));
            }
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return bad(format!("tail tolerance must lie in (0, 1), got {}", self.tail_tol));
        }
        Ok(())
    }
}

pub(crate) fn replication_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Batch means over replications, summed in slice order.
    pub fn from_batches(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Self { mean, stderr: (var / n).sqrt() }
    }

    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}
