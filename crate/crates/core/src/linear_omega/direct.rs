//! Direct solution of the inventory density ODE
//! `v″ + (λ − μ + ax) v′ + a(1 − μx) v = 0`:
//! `v₋(x) = K e^{−ax²/2 − λx} θ(x)` with `θ` the solution of Kummer's equation
//! in `ξ = (ax + λ + μ)²/(2a)` that keeps `v₋` integrable.

use serde::{Deserialize, Serialize};

use super::{classify, v_plus_linear, LinearExpModel, LinearSummary};
use crate::error::SolveError;
use crate::numerics::quad::{integrate_decaying, QuadConfig};
use crate::numerics::{hermite_prob, kummer_u, kummer_u_prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectRoute {
    /// `θ = U(−σ/2, ½, ξ)`
    Kummer,
    /// Odd integer σ: `θ = 2^{−σ/2} He_σ(√a x + (λ+μ)/√a)`.
    HermiteOdd,
    /// Even integer σ = 2n: `θ = (−1)^n n!/(2n)! 2^n He_σ(…)`.
    HermiteEven,
}

impl DirectRoute {
    pub fn name(self) -> &'static str {
        match self {
            DirectRoute::Kummer => "kummer",
            DirectRoute::HermiteOdd => "hermite-odd",
            DirectRoute::HermiteEven => "hermite-even",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSolution {
    pub model: LinearExpModel,
    pub route: DirectRoute,
    /// Scale of the inventory density.
    pub k_dir: f64,
    /// `v₊(x) = λ C e^{−(μ−λ)x}`
    pub c_const: f64,
    pub r1: f64,
    pub ei: f64,
    /// Inventory mass `φ₋(0)`.
    pub phi_minus_0: f64,
}

fn theta_and_slope(m: &LinearExpModel, route: DirectRoute, x: f64) -> Result<(f64, f64), SolveError> {
    let nu = m.sigma;
    let sa = m.a.sqrt();
    let arg = sa * x + (m.lambda + m.mu) / sa;
    let n = m.k;
    Ok(match route {
        DirectRoute::Kummer => {
            let s = m.a * x + m.lambda + m.mu;
            let xi = s * s / (2.0 * m.a);
            (
                kummer_u(-0.5 * nu, 0.5, xi)?,
                kummer_u_prime(-0.5 * nu, 0.5, xi)? * s,
            )
        }
        DirectRoute::HermiteOdd | DirectRoute::HermiteEven => {
            let pre = if route == DirectRoute::HermiteOdd {
                2f64.powf(-0.5 * nu)
            } else {
                let h = n / 2;
                let ratio: f64 = (h + 1..=n).map(|j| 1.0 / j as f64).product();
                let sign = if h.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * ratio * 2f64.powi(h as i32)
            };
            (
                pre * hermite_prob(n, arg),
                pre * sa * n as f64 * hermite_prob(n - 1, arg),
            )
        }
    })
}

fn quad_cfg() -> QuadConfig {
    QuadConfig::default().with_tol(1e-16, 1e-12)
}

pub fn direct_solve(lambda: f64, mu: f64, a: f64) -> Result<DirectSolution, SolveError> {
    let m = classify(lambda, mu, a)?;
    let route = if !m.integer {
        DirectRoute::Kummer
    } else if m.k % 2 == 1 {
        DirectRoute::HermiteOdd
    } else {
        DirectRoute::HermiteEven
    };
    let weight = |x: f64| (-0.5 * a * x * x - lambda * x).exp();
    let theta = |x: f64| theta_and_slope(&m, route, x).map(|t| t.0).unwrap_or(f64::NAN);
    let scale = (1.0 / (lambda + mu)).max(1.0 / a.sqrt()).min(1.0);
    let mass = integrate_decaying(|x| weight(x) * theta(x), 0.0, scale, &quad_cfg()).require()?;
    let first = integrate_decaying(|x| x * weight(x) * theta(x), 0.0, scale, &quad_cfg()).require()?;
    let slope0 = theta_and_slope(&m, route, 0.0)?.1;

    // C = K θ′(0)/(λμ) and C λ/(μ−λ) + K ∫ e^{−ax²/2−λx} θ = 1.
    let denom = slope0 / (mu * (mu - lambda)) + mass;
    if !(denom.is_finite() && denom != 0.0) {
        return Err(SolveError::Degenerate(format!("direct normalisation {denom}")));
    }
    let k_dir = 1.0 / denom;
    let c_const = k_dir * slope0 / (lambda * mu);
    Ok(DirectSolution {
        model: m,
        route,
        k_dir,
        c_const,
        r1: lambda * c_const,
        ei: k_dir * first,
        phi_minus_0: k_dir * mass,
    })
}

impl DirectSolution {
    pub fn theta(&self, x: f64) -> Result<f64, SolveError> {
        Ok(theta_and_slope(&self.model, self.route, x)?.0)
    }

    pub fn v_minus(&self, x: f64) -> Result<f64, SolveError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let m = &self.model;
        Ok(self.k_dir * (-0.5 * m.a * x * x - m.lambda * x).exp() * self.theta(x)?)
    }

    pub fn v_plus(&self, x: f64) -> f64 {
        v_plus_linear(&self.model, self.r1, x)
    }

    /// `c₀ = r₁/λ`; the higher coefficients are not produced by this route.
    pub fn summary(&self) -> LinearSummary {
        let m = &self.model;
        LinearSummary {
            lambda: m.lambda,
            mu: m.mu,
            a: m.a,
            sigma: m.sigma,
            k: m.k,
            c: vec![self.r1 / m.lambda],
            r1: self.r1,
            ei: self.ei,
            route: format!("direct-{}", self.route.name()),
            near_integer_warning: m.near_integer,
        }
    }
}
