//! M/G/1 queue whose inventory (negative workload) is cleared at constant
//! rate ω.

use num_complex::Complex64;

use super::{positive_root, stability, ConstantOmegaSummary, RemovableRatio};
use crate::dist::{DistSpec, ServiceDistribution};
use crate::error::SolveError;
use crate::numerics::{bromwich_invert, poly, BromwichConfig, Inversion};

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantOmegaQueueSolution {
    pub lambda: f64,
    pub omega: f64,
    pub dist: ServiceDistribution,
    pub rho: f64,
    /// Positive zero of `λβ(s) + s − λ − ω`.
    pub delta: f64,
    /// `v₋(0) = (1−ρ)δ²/ω`.
    pub a: f64,
    phi_plus: RemovableRatio,
}

pub fn solve_queue(
    lambda: f64,
    omega: f64,
    dist: &ServiceDistribution,
) -> Result<ConstantOmegaQueueSolution, SolveError> {
    let rho = stability(lambda, omega, dist.mean(), 1.0)?;
    let f = |s: f64| lambda * dist.lst_real(s) + s - lambda - omega;
    let delta = positive_root(f, omega + lambda + 1.0)?;
    let a = (1.0 - rho) * delta * delta / omega;

    // φ₊ = (1−ρ)δ/ω · [(δ−ω)s − λδ(1−β)] / [(s − λ(1−β))(s − δ)], cleared of D.
    let (n, d) = dist.rational_form();
    let d_minus_n = poly::axpby(1.0, d, -1.0, n);
    let k = (1.0 - rho) * delta / omega;
    let num = poly::axpby(
        k * (delta - omega),
        &poly::mul_s(d),
        -k * lambda * delta,
        &d_minus_n,
    );
    let f0 = poly::axpby(1.0, &poly::mul_s(d), -lambda, &d_minus_n);
    let den = poly::mul(&f0, &[-delta, 1.0]);
    let phi_plus = RemovableRatio::new(num, den, &[(0.0, 1), (delta, 1)]);

    Ok(ConstantOmegaQueueSolution {
        lambda,
        omega,
        dist: dist.clone(),
        rho,
        delta,
        a,
        phi_plus,
    })
}

/// First service of a busy period, distributed as the overshoot of a service
/// time over an exponentially distributed inventory level.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalFirstService {
    beta_hat: RemovableRatio,
    /// `E B̂`
    pub mean: f64,
    /// Probability of an empty system in the equivalent M/G/1 queue.
    pub pi0: f64,
}

impl ExceptionalFirstService {
    /// `β̂(s) = δ/(s−δ) · (β(δ) − β(s)) / (1 − β(δ))`
    pub fn lst(&self, s: Complex64) -> Complex64 {
        self.beta_hat.eval(s)
    }
}

impl ConstantOmegaQueueSolution {
    /// Mass of the inventory density, `φ₋(0) = A/δ`.
    pub fn phi_minus_0(&self) -> f64 {
        self.a / self.delta
    }

    pub fn phi_plus_0(&self) -> f64 {
        self.phi_plus.eval(Complex64::new(0.0, 0.0)).re
    }

    /// `∫_0^∞ e^{−sx} v₋(x) dx = A/(δ+s)`.
    pub fn phi_minus(&self, s: Complex64) -> Complex64 {
        self.a / (self.delta + s)
    }

    /// `∫_0^∞ e^{−sx} v₊(x) dx`, `Re s ≥ 0`.
    pub fn phi_plus(&self, s: Complex64) -> Complex64 {
        self.phi_plus.eval(s)
    }

    /// Inventory density `A e^{−δx}`.
    pub fn v_minus(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.a * (-self.delta * x).exp()
    }

    /// `v₊(0⁺) = lim s·φ₊(s) = (1−ρ)δ(δ−ω)/ω`, for every service law.
    pub fn v_plus_at_zero(&self) -> f64 {
        (1.0 - self.rho) * self.delta * (self.delta - self.omega) / self.omega
    }

    /// Workload density. Exponential service has the closed form
    /// `v₊(0) e^{−(μ−λ)x}`; other laws are summed over the poles of `φ₊`, or
    /// inverted numerically when those are not all simple.
    pub fn v_plus(&self, x: f64) -> Result<f64, SolveError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if let DistSpec::Exponential { mu } = self.dist.spec() {
            return Ok(self.v_plus_at_zero() * (-(mu - self.lambda) * x).exp());
        }
        if let Some(e) = self.phi_plus.poles() {
            return Ok(e.eval(x));
        }
        if x == 0.0 {
            return Ok(self.v_plus_at_zero());
        }
        let gamma = 0.5 * self.dist.decay_bound().min(1.0);
        let inv = self.v_plus_inversion(x, &BromwichConfig::for_point(gamma, x))?;
        if inv.converged {
            Ok(inv.value)
        } else {
            Err(SolveError::InversionTolerance { x, tail: inv.tail_estimate })
        }
    }

    /// Raw inversion of `φ₊`, whatever the service law.
    pub fn v_plus_inversion(&self, x: f64, cfg: &BromwichConfig) -> Result<Inversion, SolveError> {
        Ok(bromwich_invert(|s| self.phi_plus(s), cfg, x)?)
    }

    pub fn exceptional_first_service(&self) -> Result<ExceptionalFirstService, SolveError> {
        let delta = self.delta;
        let b_delta = self.dist.lst_real(delta);
        let (n, d) = self.dist.rational_form();
        let scale = delta / (1.0 - b_delta);
        // (β(δ)D − N) / ((s−δ)D)
        let num = poly::axpby(scale * b_delta, d, -scale, n);
        let den = poly::mul(&[-delta, 1.0], d);
        let beta_hat = RemovableRatio::new(num, den, &[(delta, 1)]);
        let mean = self.dist.mean() / (1.0 - b_delta) - 1.0 / delta;
        let pi0 = (1.0 - self.rho) / (1.0 - self.rho + self.lambda * mean);
        Ok(ExceptionalFirstService { beta_hat, mean, pi0 })
    }

    pub fn summary(&self) -> ConstantOmegaSummary {
        ConstantOmegaSummary {
            lambda: self.lambda,
            omega: self.omega,
            c: None,
            rho: self.rho,
            delta: self.delta,
            a_or_z: self.a,
            phi_minus_0: self.phi_minus_0(),
            phi_plus_0: self.phi_plus_0(),
        }
    }
}
