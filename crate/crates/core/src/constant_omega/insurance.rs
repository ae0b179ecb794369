//! Cramér-Lundberg surplus with bankruptcy at constant rate ω while the
//! surplus is negative.

use num_complex::Complex64;

use super::{positive_root, stability, ConstantOmegaSummary, RemovableRatio};
use crate::dist::{DistSpec, ServiceDistribution};
use crate::error::SolveError;
use crate::numerics::{bromwich_invert, poly, BromwichConfig, Inversion};

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantOmegaInsuranceSolution {
    pub lambda: f64,
    pub c: f64,
    pub omega: f64,
    pub dist: ServiceDistribution,
    /// `λ E Y / c`
    pub rho: f64,
    /// Positive zero of `cs − λ(1 − β(s)) − ω`.
    pub delta: f64,
    /// `−cδ(1−ρ)/ω`
    pub z: f64,
    psi_plus: RemovableRatio,
}

pub fn solve_insurance(
    lambda: f64,
    c: f64,
    omega: f64,
    dist: &ServiceDistribution,
) -> Result<ConstantOmegaInsuranceSolution, SolveError> {
    let rho = stability(lambda, omega, dist.mean(), c)?;
    let f = |s: f64| c * s - lambda * (1.0 - dist.lst_real(s)) - omega;
    let delta = positive_root(f, (lambda + omega) / c + 1.0)?;
    let z = -c * delta * (1.0 - rho) / omega;

    // Ψ₊ = Z f_ω / ((s−δ) f₀) + 1/s = [Z s F_ω + (s−δ) F₀] / [s (s−δ) F₀]
    // with F₀ = csD − λ(D−N) and F_ω = F₀ − ωD.
    let (n, d) = dist.rational_form();
    let d_minus_n = poly::axpby(1.0, d, -1.0, n);
    let f0 = poly::axpby(c, &poly::mul_s(d), -lambda, &d_minus_n);
    let fw = poly::axpby(1.0, &f0, -omega, d);
    let s_minus_delta = [-delta, 1.0];
    let num = poly::axpby(z, &poly::mul_s(&fw), 1.0, &poly::mul(&s_minus_delta, &f0));
    let den = poly::mul_s(&poly::mul(&s_minus_delta, &f0));
    let psi_plus = RemovableRatio::new(num, den, &[(0.0, 2), (delta, 1)]);

    Ok(ConstantOmegaInsuranceSolution {
        lambda,
        c,
        omega,
        dist: dist.clone(),
        rho,
        delta,
        z,
        psi_plus,
    })
}

impl ConstantOmegaInsuranceSolution {
    /// `∫_0^∞ u₋ = −Z/δ = (c − λ E Y)/ω`.
    pub fn psi_minus_0(&self) -> f64 {
        -self.z / self.delta
    }

    /// Transform of `u₋`: `−Z/(s + δ)`.
    pub fn psi_minus(&self, s: Complex64) -> Complex64 {
        -self.z / (s + self.delta)
    }

    /// Transform of the bankruptcy probability `u₊` from a positive surplus.
    pub fn psi_plus(&self, s: Complex64) -> Complex64 {
        self.psi_plus.eval(s)
    }

    /// Transform of the survival probability `1 − u₊`.
    pub fn survival_transform(&self, s: Complex64) -> Complex64 {
        1.0 / s - self.psi_plus(s)
    }

    /// Survival probability from surplus `−x`: `cδ(1−ρ)/ω · e^{−δx}`.
    pub fn u_minus(&self, x: f64) -> f64 {
        -self.z * (-self.delta * x.max(0.0)).exp()
    }

    /// Bankruptcy probability from surplus `−x`.
    pub fn u_tilde_minus(&self, x: f64) -> f64 {
        1.0 - self.u_minus(x)
    }

    /// Negative zero of `cs² + (cν − ω − λ)s − ων` (exponential claims).
    pub fn eta(&self) -> Result<f64, SolveError> {
        let nu = self.exponential_rate()?;
        let b = self.c * nu - self.omega - self.lambda;
        Ok((-(b * b + 4.0 * self.omega * nu * self.c).sqrt() - b) / (2.0 * self.c))
    }

    fn exponential_rate(&self) -> Result<f64, SolveError> {
        match self.dist.spec() {
            DistSpec::Exponential { mu } => Ok(*mu),
            _ => Err(SolveError::UnsupportedDistribution("closed-form classical survival")),
        }
    }

    /// `u₊(0⁺) = lim sΨ₊(s) = 1 + Z`.
    pub fn u_plus_at_zero(&self) -> f64 {
        1.0 + self.z
    }

    /// Bankruptcy probability from surplus `x ≥ 0`: a pole sum when `Ψ₊` has
    /// simple poles only, numerical inversion otherwise.
    pub fn u_plus(&self, x: f64) -> Result<f64, SolveError> {
        let x = x.max(0.0);
        if let DistSpec::Exponential { mu: nu } = self.dist.spec() {
            let k = nu - self.lambda / self.c;
            return Ok((1.0 - k / -self.eta()?) * (-k * x).exp());
        }
        if let Some(e) = self.psi_plus.poles() {
            return Ok(e.eval(x));
        }
        if x == 0.0 {
            return Ok(self.u_plus_at_zero());
        }
        let gamma = 0.5 * self.dist.decay_bound().min(1.0);
        let inv = self.u_plus_inversion(x, &BromwichConfig::for_point(gamma, x))?;
        if inv.converged {
            Ok(inv.value)
        } else {
            Err(SolveError::InversionTolerance { x, tail: inv.tail_estimate })
        }
    }

    pub fn u_plus_inversion(&self, x: f64, cfg: &BromwichConfig) -> Result<Inversion, SolveError> {
        Ok(bromwich_invert(|s| self.psi_plus(s), cfg, x)?)
    }

    /// Bankruptcy probability as a function of the signed initial surplus.
    pub fn bankruptcy_probability(&self, surplus: f64) -> Result<f64, SolveError> {
        if surplus >= 0.0 {
            self.u_plus(surplus)
        } else {
            Ok(self.u_tilde_minus(-surplus))
        }
    }

    /// Classical (immediate-ruin) survival probability for exponential claims,
    /// `1 − λ/(νc) · e^{−(ν−λ/c)x}`.
    pub fn classical_survival(&self, x: f64) -> Result<f64, SolveError> {
        let nu = self.exponential_rate()?;
        let k = nu - self.lambda / self.c;
        Ok(1.0 - self.lambda / (nu * self.c) * (-k * x.max(0.0)).exp())
    }

    /// Survival under bankruptcy at rate ω obtained from the classical one by
    /// averaging over an exponential(δ) capital boost:
    /// `ŝ(x) = ∫_0^∞ δ e^{−δt} s(x+t) dt`.
    pub fn ai_survival_hat(&self, x: f64) -> Result<f64, SolveError> {
        let nu = self.exponential_rate()?;
        let k = nu - self.lambda / self.c;
        let d = self.delta;
        Ok(1.0 - d / (d + k) * self.lambda / (nu * self.c) * (-k * x.max(0.0)).exp())
    }

    pub fn summary(&self) -> ConstantOmegaSummary {
        ConstantOmegaSummary {
            lambda: self.lambda,
            omega: self.omega,
            c: Some(self.c),
            rho: self.rho,
            delta: self.delta,
            a_or_z: self.z,
            phi_minus_0: self.psi_minus_0(),
            phi_plus_0: self.psi_plus(Complex64::new(0.0, 0.0)).re,
        }
    }
}
