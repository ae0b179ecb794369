//! Linear clearing rate `ω(x) = a·x` with exponential(μ) service.
//!
//! Two independent solution routes are provided: a coefficient pipeline that
//! expands the inventory transform around `z = μ` (`appendix`), and a direct
//! solution of the inventory-density ODE in terms of Kummer `U` or Hermite
//! polynomials (`direct`). Each serves as a check on the other.

pub mod appendix;
pub mod direct;

pub use appendix::{appendix_solve, AppendixSolution};
pub use direct::{direct_solve, DirectRoute, DirectSolution};

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, SolveError};

/// Relative distance below which `σ` is treated as an integer.
pub const INTEGER_TOL: f64 = 1e-12;
/// Non-integer `σ` closer than this (relative) to an integer is accepted but
/// flagged: the weight `v^{K−σ−1}` is then nearly non-integrable.
pub const NEAR_INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearExpModel {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    /// `σ = μλ/a`
    pub sigma: f64,
    /// `K = ⌈σ⌉`
    pub k: usize,
    pub integer: bool,
    pub near_integer: bool,
}

pub fn classify(lambda: f64, mu: f64, a: f64) -> Result<LinearExpModel, SolveError> {
    require_positive("lambda", lambda)?;
    require_positive("mu", mu)?;
    require_positive("a", a)?;
    if !(mu > lambda) {
        return Err(SolveError::Unstable { rho: lambda / mu });
    }
    let sigma = mu * lambda / a;
    let nearest = sigma.round();
    let gap = (sigma - nearest).abs() / sigma.max(1.0);
    let integer = nearest >= 1.0 && gap < INTEGER_TOL;
    let k = if integer { nearest as usize } else { sigma.ceil() as usize };
    Ok(LinearExpModel {
        lambda,
        mu,
        a,
        sigma,
        k,
        integer,
        near_integer: !integer && nearest >= 1.0 && gap < NEAR_INTEGER_TOL,
    })
}

impl LinearExpModel {
    /// `A₁(v) = ((μ+λ)v − v²/2)/a`
    pub fn a1(&self, v: f64) -> f64 {
        ((self.mu + self.lambda) * v - 0.5 * v * v) / self.a
    }

    /// `A₂(v) = −((μ+λ)v + v²/2)/a`
    pub fn a2(&self, v: f64) -> f64 {
        -((self.mu + self.lambda) * v + 0.5 * v * v) / self.a
    }

    pub fn rho(&self) -> f64 {
        self.lambda / self.mu
    }
}

/// Workload density `r₁ e^{−(μ−λ)x}`, common to both routes.
pub fn v_plus_linear(model: &LinearExpModel, r1: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    r1 * (-(model.mu - model.lambda) * x).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSummary {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub sigma: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub c: Vec<f64>,
    pub r1: f64,
    #[serde(rename = "EI")]
    pub ei: f64,
    pub route: String,
    #[serde(default)]
    pub near_integer_warning: bool,
}
