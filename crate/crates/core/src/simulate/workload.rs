//! Two-sided workload/inventory process. `X(t) > 0` is workload and drains
//! at unit rate; `X(t) < 0` is inventory `−X`, which builds at unit rate and
//! is wiped out at the epochs of a Poisson process with rate `ω(−X)`.

use serde::{Deserialize, Serialize};

use super::{replication_rng, Estimate, RateSpec, SimConfig};
use crate::dist::{std_exponential, Sampler, ServiceDistribution};
use crate::error::SolveError;
use crate::exec::map_indexed;

/// Time-weighted occupancy of one side, normalised to a (defective) density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Fraction of time spent beyond the histogram range.
    pub overflow: Estimate,
}

impl Histogram {
    pub fn edges(&self, k: usize) -> (f64, f64) {
        (k as f64 * self.bin_width, (k + 1) as f64 * self.bin_width)
    }

    pub fn range(&self) -> f64 {
        self.density.len() as f64 * self.bin_width
    }

    /// Average of `f` over bin `k`.
    pub fn bin_average(&self, k: usize, f: &dyn Fn(f64) -> f64) -> f64 {
        let (l, r) = self.edges(k);
        // 3-point Gauss-Legendre
        let (m, h) = (0.5 * (l + r), 0.5 * (r - l));
        let g = h * (0.6f64).sqrt();
        (5.0 * f(m - g) + 8.0 * f(m) + 5.0 * f(m + g)) / 18.0
    }

    /// `∫|ĥ − f|` over the histogram range plus the mismatch of the mass
    /// beyond it. `total_mass` is `∫₀^∞ f`; the analytic tail is what the bins
    /// leave of it, so `f` is never evaluated far out.
    pub fn l1_distance(&self, f: &dyn Fn(f64) -> f64, total_mass: f64) -> f64 {
        let mut covered = 0.0;
        let mut inside = 0.0;
        for k in 0..self.density.len() {
            let avg = self.bin_average(k, f);
            covered += avg * self.bin_width;
            inside += (self.density[k] - avg).abs() * self.bin_width;
        }
        inside + (self.overflow.mean - (total_mass - covered)).abs()
    }

    /// Largest `|ĥ − f̄| / se` over bins whose batch-means error is itself
    /// trustworthy. Bins reached by only a few replications (relative error
    /// above 1/2) are skipped: with a single non-empty batch the standard error
    /// equals the mean and the z-score says nothing.
    pub fn max_z_score(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        (0..self.density.len())
            .filter(|&k| self.stderr[k] > 0.0 && self.stderr[k] < 0.5 * self.density[k])
            .map(|k| ((self.density[k] - self.bin_average(k, f)) / self.stderr[k]).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Occupancy of inventory levels `(0, x_max_neg]`.
    pub inventory: Histogram,
    /// Occupancy of workload levels `(0, x_max_pos]`.
    pub workload: Histogram,
    pub phi_minus_0: Estimate,
    pub phi_plus_0: Estimate,
    pub mean_inventory: Estimate,
    /// Clearing events per unit time.
    pub clearing_rate: Estimate,
    pub replications: usize,
    pub events: u64,
    pub seed: u64,
}

struct Acc {
    w: f64,
    burn_in: f64,
    horizon: f64,
    neg: Vec<f64>,
    pos: Vec<f64>,
    over_neg: f64,
    over_pos: f64,
    t_neg: f64,
    t_pos: f64,
    int_inv: f64,
    clearings: u64,
    events: u64,
}

impl Acc {
    /// The level moves linearly at unit speed from `from` to `to`, starting at
    /// time `t0`; record the part inside `[burn_in, horizon]`.
    fn occupy(&mut self, inventory: bool, from: f64, to: f64, t0: f64) {
        let len = (to - from).abs();
        let dir = (to - from).signum();
        let start = (self.burn_in - t0).clamp(0.0, len);
        let stop = (self.horizon - t0).clamp(0.0, len);
        if stop <= start {
            return;
        }
        let (a, b) = (from + dir * start, from + dir * stop);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let dt = hi - lo;
        let (bins, over) = if inventory {
            self.t_neg += dt;
            self.int_inv += 0.5 * (lo + hi) * dt;
            (&mut self.neg, &mut self.over_neg)
        } else {
            self.t_pos += dt;
            (&mut self.pos, &mut self.over_pos)
        };
        let top = bins.len() as f64 * self.w;
        if hi > top {
            *over += hi - lo.max(top);
        }
        if lo >= top {
            return;
        }
        let hi = hi.min(top);
        let first = (lo / self.w) as usize;
        let last = ((hi / self.w) as usize).min(bins.len() - 1);
        for (k, bin) in bins.iter_mut().enumerate().take(last + 1).skip(first) {
            let (l, r) = (k as f64 * self.w, (k + 1) as f64 * self.w);
            let overlap = hi.min(r) - lo.max(l);
            if overlap > 0.0 {
                *bin += overlap;
            }
        }
    }
}

fn replicate(
    lambda: f64,
    sampler: &Sampler,
    rate: RateSpec,
    cfg: &SimConfig,
    rep: usize,
) -> Acc {
    let mut rng = replication_rng(cfg.seed, rep);
    let nbins = |x: f64| (x / cfg.bin_width).ceil().max(1.0) as usize;
    let mut acc = Acc {
        w: cfg.bin_width,
        burn_in: cfg.burn_in,
        horizon: cfg.time,
        neg: vec![0.0; nbins(cfg.x_max_neg)],
        pos: vec![0.0; nbins(cfg.x_max_pos)],
        over_neg: 0.0,
        over_pos: 0.0,
        t_neg: 0.0,
        t_pos: 0.0,
        int_inv: 0.0,
        clearings: 0,
        events: 0,
    };
    let mut t = 0.0;
    let mut x: f64 = 0.0;
    let mut next_arrival = std_exponential(&mut rng) / lambda;
    while t < cfg.time {
        if x > 0.0 {
            let empty_at = t + x;
            if next_arrival < empty_at {
                let dt = next_arrival - t;
                acc.occupy(false, x, x - dt, t);
                x -= dt;
                t = next_arrival;
                x += sampler.sample(&mut rng);
                next_arrival = t + std_exponential(&mut rng) / lambda;
                acc.events += 1;
            } else {
                acc.occupy(false, x, 0.0, t);
                t = empty_at;
                x = 0.0;
            }
        } else {
            let level = -x;
            let clear_at = t + rate.clearing_time(level, std_exponential(&mut rng));
            if clear_at < next_arrival {
                acc.occupy(true, level, level + (clear_at - t), t);
                if clear_at >= cfg.burn_in && clear_at <= cfg.time {
                    acc.clearings += 1;
                }
                t = clear_at;
                x = 0.0;
            } else {
                let dt = next_arrival - t;
                acc.occupy(true, level, level + dt, t);
                t = next_arrival;
                x = -(level + dt) + sampler.sample(&mut rng);
                next_arrival = t + std_exponential(&mut rng) / lambda;
            }
            acc.events += 1;
        }
    }
    acc
}

fn histogram(accs: &[Acc], span: f64, w: f64, inventory: bool) -> Histogram {
    let n = if inventory { accs[0].neg.len() } else { accs[0].pos.len() };
    let mut density = Vec::with_capacity(n);
    let mut stderr = Vec::with_capacity(n);
    let mut batch = vec![0.0; accs.len()];
    for k in 0..n {
        for (b, a) in batch.iter_mut().zip(accs) {
            *b = if inventory { a.neg[k] } else { a.pos[k] } / (span * w);
        }
        let e = Estimate::from_batches(&batch);
        density.push(e.mean);
        stderr.push(e.stderr);
    }
    let over: Vec<f64> = accs
        .iter()
        .map(|a| if inventory { a.over_neg } else { a.over_pos } / span)
        .collect();
    Histogram {
        bin_width: w,
        density,
        stderr,
        overflow: Estimate::from_batches(&over),
    }
}

pub fn simulate_workload(
    lambda: f64,
    dist: &ServiceDistribution,
    rate: RateSpec,
    cfg: &SimConfig,
) -> Result<DensityEstimate, SolveError> {
    crate::error::require_positive("lambda", lambda)?;
    rate.validate()?;
    cfg.validate()?;
    let rho = lambda * dist.mean();
    if rho >= 1.0 {
        return Err(SolveError::Unstable { rho });
    }
    let sampler = dist.sampler()?;
    let accs = map_indexed(cfg.exec, cfg.replications, |r| {
        replicate(lambda, &sampler, rate, cfg, r)
    });
    let span = cfg.time - cfg.burn_in;
    let per = |f: &dyn Fn(&Acc) -> f64| {
        let xs: Vec<f64> = accs.iter().map(|a| f(a) / span).collect();
        Estimate::from_batches(&xs)
    };
    Ok(DensityEstimate {
        inventory: histogram(&accs, span, cfg.bin_width, true),
        workload: histogram(&accs, span, cfg.bin_width, false),
        phi_minus_0: per(&|a| a.t_neg),
        phi_plus_0: per(&|a| a.t_pos),
        mean_inventory: per(&|a| a.int_inv),
        clearing_rate: per(&|a| a.clearings as f64),
        replications: cfg.replications,
        events: accs.iter().map(|a| a.events).sum(),
        seed: cfg.seed,
    })
}
