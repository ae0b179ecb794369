//! Laplace inversion along the Bromwich line `Re z = γ`.
//!
//! The contour integral is discretised by the trapezoidal rule with step
//! `π/x`, which turns it into the alternating series
//!
//! ```text
//! f(x) ≈ e^{γx}/x · [ ½ Re F(γ) + Σ_{k≥1} (−1)^k Re F(γ + ikπ/x) ]
//! ```
//!
//! whose discretisation error is of order `e^{−2γx}`. The abscissa is raised
//! to `A/(2x)` when that is larger than the configured one, making the error
//! `≈ e^{−A}`. The alternating tail is summed either by plain truncation or by
//! binomial (Euler) averaging of successive partial sums; in both cases the
//! truncation frequency is doubled until two estimates agree.

use num_complex::Complex64;

use super::{NumericsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BromwichRule {
    Trapezoid,
    EulerTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BromwichConfig {
    /// Lower bound for the abscissa; must lie right of every singularity.
    pub gamma: f64,
    /// Number of terms before the first doubling (`Ω = terms·π/x`).
    pub terms: usize,
    /// Number of partial sums averaged by the Euler rule.
    pub euler_terms: usize,
    /// Target for the discretisation error, `e^{−A}`.
    pub discretisation: f64,
    pub rule: BromwichRule,
    /// Two successive estimates must agree to this absolute tolerance.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for BromwichConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            terms: 15,
            euler_terms: 11,
            discretisation: 18.4,
            rule: BromwichRule::EulerTrapezoid,
            tol: 1e-7,
            max_doublings: 8,
        }
    }
}

impl BromwichConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    /// `with_gamma`, with the abscissa lowered far out so that the factor
    /// `e^{γx}` cannot swamp the sum in round-off. Only valid when every
    /// singularity lies in `Re s < 0`.
    pub fn for_point(gamma: f64, x: f64) -> Self {
        Self::with_gamma(gamma.min(MAX_GROWTH / x))
    }
}

/// Largest `γx` allowed by [`BromwichConfig::for_point`].
const MAX_GROWTH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    /// Difference between the last two estimates.
    pub tail_estimate: f64,
    pub converged: bool,
    /// Highest frequency used, `Ω`.
    pub omega: f64,
}

/// Invert `transform` at `x > 0`.
pub fn bromwich_invert<F>(transform: F, cfg: &BromwichConfig, x: f64) -> Result<Inversion>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::InvalidArgument(format!(
            "inversion point must be positive, got {x}"
        )));
    }
    if cfg.terms == 0 {
        return Err(NumericsError::InvalidArgument("terms must be positive".into()));
    }
    let sigma = cfg.gamma.max(cfg.discretisation / (2.0 * x));
    let h = std::f64::consts::PI / x;
    let prefactor = (sigma * x).exp() / x;

    // Alternating terms a_k = (−1)^k Re F(σ + ikh), with a_0 halved.
    let mut terms: Vec<f64> = Vec::new();
    let extend = |terms: &mut Vec<f64>, upto: usize| -> Result<()> {
        while terms.len() <= upto {
            let k = terms.len();
            let v = transform(Complex64::new(sigma, k as f64 * h)).re;
            if !v.is_finite() {
                return Err(NumericsError::InvalidArgument(format!(
                    "transform not finite at {sigma} + {}i",
                    k as f64 * h
                )));
            }
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            terms.push(if k == 0 { 0.5 * v } else { sign * v });
        }
        Ok(())
    };

    let estimate = |terms: &[f64], n: usize| -> f64 {
        match cfg.rule {
            BromwichRule::Trapezoid => terms[..=n].iter().sum::<f64>(),
            BromwichRule::EulerTrapezoid => {
                let m = cfg.euler_terms;
                let mut partial: f64 = terms[..=n].iter().sum();
                let mut acc = 0.0;
                let mut binom = 1.0;
                for j in 0..=m {
                    if j > 0 {
                        partial += terms[n + j];
                        binom *= (m - j + 1) as f64 / j as f64;
                    }
                    acc += binom * partial;
                }
                acc / 2f64.powi(m as i32)
            }
        }
    };
    let span = |n: usize| match cfg.rule {
        BromwichRule::Trapezoid => n,
        BromwichRule::EulerTrapezoid => n + cfg.euler_terms,
    };

    let mut n = cfg.terms;
    extend(&mut terms, span(n))?;
    let mut prev = prefactor * estimate(&terms, n);
    let mut diff = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        n *= 2;
        extend(&mut terms, span(n))?;
        let cur = prefactor * estimate(&terms, n);
        diff = (cur - prev).abs();
        prev = cur;
        if diff < cfg.tol {
            break;
        }
    }
    Ok(Inversion {
        value: prev,
        tail_estimate: diff,
        converged: diff < cfg.tol,
        omega: span(n) as f64 * h,
    })
}
