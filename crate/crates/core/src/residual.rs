//! Level-crossing residuals: plug computed densities / probabilities back into
//! the stationary integral equations and report the imbalance at a point.
//!
//! Queue, workload level `x > 0`:
//! `v₊(x) − λ∫_0^x P(B > x−y) v₊(y) dy − λ∫_0^∞ P(B > x+y) v₋(y) dy`.
//!
//! Queue, inventory level `x > 0`:
//! `v₋(x) − λ∫_x^∞ P(B > y−x) v₋(y) dy − ∫_x^∞ ω(y) v₋(y) dy`.
//!
//! Insurance, surplus `x > 0`:
//! `c u₊′(x) − λu₊(x) + λ(∫_0^x u₊(x−y) dB(y) + ∫_x^∞ ũ₋(y−x) dB(y))`.
//!
//! Insurance, surplus `−x < 0`:
//! `−c ũ₋′(x) − (λ + ω(x)) ũ₋(x) + ω(x) + λ∫_0^∞ ũ₋(x+y) dB(y)`.

use crate::dist::ServiceDistribution;
use crate::error::SolveError;
use crate::numerics::quad::{integrate, integrate_decaying, QuadConfig};

/// Three orders below the smallest residual worth reporting, and above the
/// round-off floor of densities obtained by inversion.
fn cfg() -> QuadConfig {
    QuadConfig::default().with_tol(1e-10, 1e-9).with_panels(4)
}

fn survival(dist: &ServiceDistribution) -> Result<impl Fn(f64) -> f64 + '_, SolveError> {
    dist.survival(0.0)
        .ok_or(SolveError::UnsupportedDistribution("residual checks"))?;
    Ok(move |t: f64| dist.survival(t).unwrap_or(f64::NAN))
}

fn density(dist: &ServiceDistribution) -> Result<impl Fn(f64) -> f64 + '_, SolveError> {
    dist.density(0.0)
        .ok_or(SolveError::UnsupportedDistribution("residual checks"))?;
    Ok(move |t: f64| dist.density(t).unwrap_or(f64::NAN))
}

/// Characteristic length used to cut infinite ranges.
fn scale(dist: &ServiceDistribution) -> f64 {
    (1.0 / dist.decay_bound()).min(dist.mean()).max(1e-3)
}

fn finish(v: f64) -> Result<f64, SolveError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SolveError::Degenerate("residual is not finite".into()))
    }
}

pub fn queue_workload_residual(
    lambda: f64,
    dist: &ServiceDistribution,
    v_plus: &dyn Fn(f64) -> f64,
    v_minus: &dyn Fn(f64) -> f64,
    x: f64,
) -> Result<f64, SolveError> {
    let sb = survival(dist)?;
    let c = cfg();
    let own = integrate(|y| sb(x - y) * v_plus(y), 0.0, x, &c);
    let inv = integrate_decaying(|y| sb(x + y) * v_minus(y), 0.0, scale(dist), &c);
    finish(v_plus(x) - lambda * own.value - lambda * inv.value)
}

pub fn queue_inventory_residual(
    lambda: f64,
    dist: &ServiceDistribution,
    omega: &dyn Fn(f64) -> f64,
    v_minus: &dyn Fn(f64) -> f64,
    x: f64,
) -> Result<f64, SolveError> {
    let sb = survival(dist)?;
    let c = cfg();
    let s = scale(dist);
    let jumps = integrate_decaying(|y| sb(y - x) * v_minus(y), x, s, &c);
    let clear = integrate_decaying(|y| omega(y) * v_minus(y), x, s, &c);
    finish(v_minus(x) - lambda * jumps.value - clear.value)
}

/// `h` is the central-difference step for `u₊′`.
pub fn insurance_positive_residual(
    lambda: f64,
    premium: f64,
    dist: &ServiceDistribution,
    u_plus: &dyn Fn(f64) -> f64,
    u_tilde_minus: &dyn Fn(f64) -> f64,
    x: f64,
    h: f64,
) -> Result<f64, SolveError> {
    let b = density(dist)?;
    let c = cfg();
    let d = (u_plus(x + h) - u_plus(x - h)) / (2.0 * h);
    let own = integrate(|y| u_plus(x - y) * b(y), 0.0, x, &c);
    let over = integrate_decaying(|y| u_tilde_minus(y - x) * b(y), x, scale(dist), &c);
    finish(premium * d - lambda * u_plus(x) + lambda * (own.value + over.value))
}

pub fn insurance_negative_residual(
    lambda: f64,
    premium: f64,
    dist: &ServiceDistribution,
    omega: &dyn Fn(f64) -> f64,
    u_tilde_minus: &dyn Fn(f64) -> f64,
    x: f64,
    h: f64,
) -> Result<f64, SolveError> {
    let b = density(dist)?;
    let c = cfg();
    let d = (u_tilde_minus(x + h) - u_tilde_minus(x - h)) / (2.0 * h);
    let w = omega(x);
    let jump = integrate_decaying(|y| u_tilde_minus(x + y) * b(y), 0.0, scale(dist), &c);
    finish(-premium * d - (lambda + w) * u_tilde_minus(x) + w + lambda * jump.value)
}
