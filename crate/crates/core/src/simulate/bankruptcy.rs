//! Cramér-Lundberg surplus with hazard-driven bankruptcy while negative.
//! Paths that climb to the threshold `M` are declared survivors; the bias
//! this introduces is at most the classical ruin probability from `M`.

use serde::{Deserialize, Serialize};

use super::{replication_rng, RateSpec, SimConfig};
use crate::dist::{std_exponential, DistSpec, ServiceDistribution};
use crate::error::SolveError;
use crate::exec::map_indexed;
use crate::numerics::find_root_monotone;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankruptcyEstimate {
    pub x0: f64,
    pub probability: f64,
    pub stderr: f64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Upper bound on the downward bias from declaring survival at `M`.
    pub tail_bias: f64,
    pub threshold: f64,
    pub paths: u64,
    pub bankrupt: u64,
    pub seed: u64,
}

/// Adjustment coefficient `R > 0`: `λ(E e^{RY} − 1) = cR`.
pub fn lundberg_coefficient(lambda: f64, c: f64, dist: &ServiceDistribution) -> Result<f64, SolveError> {
    if let DistSpec::Exponential { mu } = dist.spec() {
        return Ok(mu - lambda / c);
    }
    let bound = dist.decay_bound();
    let f = |r: f64| lambda * (dist.lst_real(-r) - 1.0) - c * r;
    let lo = 1e-9 * bound;
    let mut hi = bound * (1.0 - 1e-9);
    // The moment generating function blows up at the pole; back off until
    // it is finite.
    while !f(hi).is_finite() {
        hi = 0.5 * (hi + bound * (1.0 - 1e-6));
    }
    Ok(find_root_monotone(f, lo, hi)?)
}

/// Threshold `M` with classical ruin probability from `M` at most `eps`.
pub fn survival_threshold(lambda: f64, c: f64, dist: &ServiceDistribution, eps: f64) -> Result<f64, SolveError> {
    let r = lundberg_coefficient(lambda, c, dist)?;
    let m = match dist.spec() {
        // ψ(x) = λ/(μc) e^{−Rx}
        DistSpec::Exponential { mu } => (lambda / (mu * c) / eps).ln() / r,
        _ => (1.0 / eps).ln() / r,
    };
    Ok(m.max(1e-9))
}

fn one_path<R: rand::Rng>(
    rng: &mut R,
    sampler: &crate::dist::Sampler,
    lambda: f64,
    c: f64,
    rate: RateSpec,
    x0: f64,
    m: f64,
) -> bool {
    let mut surplus = x0;
    loop {
        if surplus >= m {
            return false;
        }
        let to_claim = std_exponential(rng) / lambda;
        if surplus >= 0.0 {
            if surplus + c * to_claim >= m {
                return false;
            }
            surplus += c * to_claim - sampler.sample(rng);
        } else {
            let level = -surplus;
            let to_zero = level / c;
            let tau = rate.bankruptcy_time(level, c, std_exponential(rng));
            if tau < to_claim.min(to_zero) {
                return true;
            }
            if to_claim < to_zero {
                surplus += c * to_claim - sampler.sample(rng);
            } else {
                // Back at zero; the pending claim clock restarts by memorylessness.
                surplus = 0.0;
            }
        }
    }
}

pub fn simulate_bankruptcy(
    lambda: f64,
    c: f64,
    rate: RateSpec,
    dist: &ServiceDistribution,
    x0: f64,
    cfg: &SimConfig,
) -> Result<BankruptcyEstimate, SolveError> {
    crate::error::require_positive("lambda", lambda)?;
    crate::error::require_positive("c", c)?;
    rate.validate()?;
    cfg.validate()?;
    if !x0.is_finite() {
        return Err(SolveError::InvalidParameter(format!("initial surplus {x0} is not finite")));
    }
    if cfg.paths == 0 {
        return Err(SolveError::InvalidParameter("paths must be positive".into()));
    }
    let rho = lambda * dist.mean() / c;
    if rho >= 1.0 {
        return Err(SolveError::Unstable { rho });
    }
    let sampler = dist.sampler()?;
    let (m, tail_bias) = match cfg.threshold {
        Some(m) => {
            let r = lundberg_coefficient(lambda, c, dist)?;
            (m, (-r * m).exp())
        }
        None => (survival_threshold(lambda, c, dist, cfg.tail_tol)?, cfg.tail_tol),
    };
    let reps = cfg.replications as u64;
    let counts = map_indexed(cfg.exec, cfg.replications, |r| {
        let n = cfg.paths / reps + u64::from((r as u64) < cfg.paths % reps);
        let mut rng = replication_rng(cfg.seed, r);
        (0..n)
            .filter(|_| one_path(&mut rng, &sampler, lambda, c, rate, x0, m))
            .count() as u64
    });
    let bankrupt: u64 = counts.iter().sum();
    let n = cfg.paths as f64;
    let p = bankrupt as f64 / n;
    // Wilson score interval, z = 1.96
    let z = 1.959_963_984_540_054;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Ok(BankruptcyEstimate {
        x0,
        probability: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        ci_low: (centre - half).max(0.0),
        ci_high: (centre + half).min(1.0),
        tail_bias,
        threshold: m,
        paths: cfg.paths,
        bankrupt,
        seed: cfg.seed,
    })
}
