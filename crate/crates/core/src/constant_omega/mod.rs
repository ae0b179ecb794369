//! Constant bankruptcy/clearing rate ω: closed-form Wiener-Hopf solutions for
//! the queue with inventory clearing and for the insurance model.

pub mod insurance;
pub mod queue;

pub use insurance::{solve_insurance, ConstantOmegaInsuranceSolution};
pub use queue::{solve_queue, ConstantOmegaQueueSolution, ExceptionalFirstService};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::numerics::{find_root_monotone, poly, roots::expand_bracket};

/// Points closer than this to a removable singularity use the local series.
pub const REMOVABLE_RADIUS: f64 = 1e-4;
const SERIES_TERMS: usize = 4;

/// Ratio of two real polynomials with known removable singularities on the
/// real axis. Near each such point the ratio is evaluated from the quotient of
/// the Taylor expansions with the common zero factor cancelled.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovableRatio {
    num: Vec<f64>,
    den: Vec<f64>,
    expansions: Vec<(f64, Vec<Complex64>)>,
    poles: Option<PoleExpansion>,
}

/// `f(x) = Σ rₖ e^{pₖx}`, the inverse transform of a proper rational function
/// whose poles are simple and lie in the open left half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleExpansion {
    /// `(pₖ, rₖ)`; complex poles come in conjugate pairs.
    pub terms: Vec<(Complex64, Complex64)>,
}

impl PoleExpansion {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(p, r)| (r * (p * x).exp()).re).sum()
    }
}

impl RemovableRatio {
    /// `points` lists `(s₀, order)`: both polynomials vanish to `order` at `s₀`.
    pub fn new(num: Vec<f64>, den: Vec<f64>, points: &[(f64, usize)]) -> Self {
        let expansions = points
            .iter()
            .map(|&(s0, order)| {
                let z0 = Complex64::new(s0, 0.0);
                let tn = poly::taylor_at(&num, z0);
                let td = poly::taylor_at(&den, z0);
                let tn = tn.get(order..).unwrap_or(&[]).to_vec();
                let td = td.get(order..).unwrap_or(&[]).to_vec();
                (s0, poly::series_div(&tn, &td, SERIES_TERMS))
            })
            .collect();
        let poles = pole_expansion(&num, &den, points);
        Self { num, den, expansions, poles }
    }

    /// Exact inverse transform, when the reduced denominator has only simple
    /// zeros in `Re s < 0` and the ratio is proper.
    pub fn poles(&self) -> Option<&PoleExpansion> {
        self.poles.as_ref()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        for (s0, coeffs) in &self.expansions {
            let h = s - s0;
            if h.norm() < REMOVABLE_RADIUS {
                return poly::eval_cc(coeffs, h);
            }
        }
        poly::eval_c(&self.num, s) / poly::eval_c(&self.den, s)
    }
}

fn pole_expansion(num: &[f64], den: &[f64], removable: &[(f64, usize)]) -> Option<PoleExpansion> {
    if poly::degree(num) >= poly::degree(den) {
        return None;
    }
    let mut zeros = poly::roots(den).ok()?;
    // Aberth resolves a zero of order m only to about ε^{1/m}.
    for &(s0, order) in removable {
        for _ in 0..order {
            let z0 = Complex64::new(s0, 0.0);
            let (i, d) = zeros
                .iter()
                .map(|z| (z - z0).norm())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            if d > 1e-5 * s0.abs().max(1.0) {
                return None;
            }
            zeros.swap_remove(i);
        }
    }
    let scale = zeros.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    for (i, zi) in zeros.iter().enumerate() {
        if zi.re >= 0.0 || zeros[i + 1..].iter().any(|zj| (zi - zj).norm() < 1e-6 * scale) {
            return None;
        }
    }
    let dden = poly::derivative(den);
    let terms = zeros
        .into_iter()
        .map(|p| (p, poly::eval_c(num, p) / poly::eval_c(&dden, p)))
        .collect();
    Some(PoleExpansion { terms })
}

/// Unique positive root of the strictly increasing `f` with `f(0) < 0`.
pub(crate) fn positive_root<F: Fn(f64) -> f64>(f: F, hi: f64) -> Result<f64, SolveError> {
    let (lo, hi) = expand_bracket(&f, 0.0, hi, 80)?;
    Ok(find_root_monotone(&f, lo, hi)?)
}

pub(crate) fn stability(lambda: f64, omega: f64, mean: f64, c: f64) -> Result<f64, SolveError> {
    crate::error::require_positive("lambda", lambda)?;
    crate::error::require_positive("omega", omega)?;
    crate::error::require_positive("c", c)?;
    let rho = lambda * mean / c;
    if rho < 1.0 {
        Ok(rho)
    } else {
        Err(SolveError::Unstable { rho })
    }
}

/// JSON summary shared by both constant-ω solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantOmegaSummary {
    pub lambda: f64,
    pub omega: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    pub rho: f64,
    pub delta: f64,
    #[serde(rename = "A_or_Z")]
    pub a_or_z: f64,
    pub phi_minus_0: f64,
    pub phi_plus_0: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removable_ratio_matches_cancelled_form() {
        // (s−1)(s+3) / ((s−1)(s+2)) = (s+3)/(s+2)
        let num = poly::mul(&[-1.0, 1.0], &[3.0, 1.0]);
        let den = poly::mul(&[-1.0, 1.0], &[2.0, 1.0]);
        let r = RemovableRatio::new(num, den, &[(1.0, 1)]);
        for &h in &[0.0, 1e-9, 5e-5, -3e-5, 0.3] {
            let s = Complex64::new(1.0 + h, 0.0);
            let want = (s + 3.0) / (s + 2.0);
            assert!((r.eval(s) - want).norm() < 1e-14, "h={h}");
        }
    }
}
