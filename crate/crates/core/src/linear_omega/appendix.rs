//! Coefficient pipeline: the inventory transform is written as a polynomial
//! in `w = μ − z` of degree `K−1` plus `w^σ` times weighted integrals, and the
//! coefficients `c_0..c_K` follow from a backward recursion fixed by the
//! behaviour of the transform at infinity and by normalisation.

use num_complex::Complex64;

use super::{classify, v_plus_linear, LinearExpModel, LinearSummary};
use crate::error::SolveError;
use crate::numerics::quad::{integrate, integrate_decaying, QuadConfig};
use crate::numerics::{
    bromwich_invert, hermite_prob, singular_integral, BromwichConfig, Inversion,
    SingularWeightIntegral, WeightSign,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixSolution {
    pub model: LinearExpModel,
    /// `B_k = c_k / c_K`
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub r1: f64,
    /// Mean inventory level.
    pub ei: f64,
    /// `I_{K−σ}`
    pub i_hi: f64,
    /// `I_{K−σ−1}` (non-integer σ) or `I_0` (integer σ).
    pub i_lo: f64,
    /// `e^{−A₁(μ)} 𝒥_{K−σ}`
    pub j_hi: f64,
    /// `e^{−A₁(μ)} 𝒥_{K−σ−1}`, non-integer σ only.
    pub j_lo: Option<f64>,
    /// `v₋^{(n)}(0)`, `n = 0, 1, …`, while representable.
    pub derivatives: Vec<f64>,
}

/// Far below the accuracy of any inverted value.
const NEGLIGIBLE_DENSITY: f64 = 1e-20;
/// The large-`|z|` expansion of `φ₋` is tried only beyond this modulus.
const ASYMPTOTIC_MIN_MODULUS: f64 = 8.0;
/// Below this level the density is summed from its Taylor series; inversion
/// there needs abscissae so large that the transform cancels badly.
const SERIES_MAX_X: f64 = 0.5;

fn quad_cfg() -> QuadConfig {
    QuadConfig::default().with_tol(1e-16, 1e-12)
}

/// `I_p = ∫_0^∞ v^p e^{A₂(v)} dv`
pub fn i_integral(m: &LinearExpModel, p: f64) -> Result<f64, SolveError> {
    let spec = SingularWeightIntegral::new(
        p,
        (m.mu + m.lambda) / m.a,
        0.5 / m.a,
        None,
        WeightSign::Decaying,
    );
    Ok(singular_integral(&spec)?)
}

/// `∫_0^w v^p e^{A₁(v) − A₁(w)} dv`; with `w = μ` this is `e^{−A₁(μ)} 𝒥_p`.
pub fn growing_integral(m: &LinearExpModel, p: f64, w: f64) -> Result<f64, SolveError> {
    let spec = SingularWeightIntegral::new(
        p,
        (m.mu + m.lambda) / m.a,
        0.5 / m.a,
        Some(w),
        WeightSign::Growing,
    )
    .shifted(m.a1(w));
    Ok(singular_integral(&spec)?)
}

/// `G_p(w) = ∫_0^∞ (w+u)^p exp(−((z+λ)u + u²/2)/a) du` for real `z = μ + w`,
/// `w ≥ 0`, `p > −1`.
fn g_real(m: &LinearExpModel, p: f64, w: f64) -> Result<f64, SolveError> {
    let z = m.mu + w;
    let e = |u: f64| ((z + m.lambda) * u + 0.5 * u * u) / m.a;
    let su = (m.a / (z + m.lambda)).min(m.a.sqrt());
    let cfg = quad_cfg();
    let r = if p >= 0.0 {
        integrate_decaying(|u: f64| (w + u).powf(p) * (-e(u)).exp(), 0.0, su, &cfg)
    } else {
        // y = (w+u)^q absorbs the singular factor: (w+u)^p du = dy/q.
        let q = 1.0 + p;
        let y0 = w.powf(q);
        let scale = (w + su).powf(q) - y0;
        let r = integrate_decaying(
            |y: f64| (-e((y.powf(1.0 / q) - w).max(0.0))).exp(),
            y0,
            scale,
            &cfg,
        );
        crate::numerics::QuadResult { value: r.value / q, ..r }
    };
    Ok(r.require()?)
}

/// Complex `G_p` for `Re w > 0`, integrated along a ray rotated by half the
/// argument of `z + λ` so that both the linear and the quadratic parts decay.
fn g_complex(m: &LinearExpModel, p: f64, z: Complex64) -> Result<Complex64, SolveError> {
    let w = z - m.mu;
    let zl = z + m.lambda;
    let rot = Complex64::from_polar(1.0, -0.5 * zl.arg());
    let su = (m.a / zl.norm()).min(m.a.sqrt());
    let f = |t: f64| {
        let u = rot * t;
        (w + u).powf(p) * (-(zl * u + 0.5 * u * u) / m.a).exp() * rot
    };
    Ok(integrate_decaying(f, 0.0, su, &quad_cfg()).require()?)
}

fn a1_complex(m: &LinearExpModel, v: Complex64) -> Complex64 {
    ((m.mu + m.lambda) * v - 0.5 * v * v) / m.a
}

/// Complex `∫_0^w v^p e^{A₁(v) − A₁(w)} dv` along the segment `v = w t`. With
/// `u = t^{p+1}` the endpoint singularity disappears:
/// `w^{p+1}/(p+1) ∫_0^1 exp(A₁(w u^{1/(p+1)}) − A₁(w)) du`.
fn growing_complex(m: &LinearExpModel, p: f64, w: Complex64) -> Result<Complex64, SolveError> {
    let q = p + 1.0;
    let aw = a1_complex(m, w);
    let f = |u: f64| (a1_complex(m, w * u.powf(1.0 / q)) - aw).exp();
    let cfg = quad_cfg().with_panels(8);
    let r = integrate(f, 0.0, 1.0, &cfg).require()?;
    Ok(w.powf(q) / q * r)
}

const MAX_DERIVATIVES: usize = 400;

/// Derivatives of `v₋` at the origin from the level-crossing system
/// `v′ = −(λ + ax) v + λμ J`, `J′ = μJ − v` (see [`AppendixSolution::v_minus_series`]):
/// `v^{(n+1)} = −λ v^{(n)} − a n v^{(n−1)} + λμ J^{(n)}`, `J^{(n+1)} = μ J^{(n)} − v^{(n)}`.
fn density_derivatives(m: &LinearExpModel, v0: f64, j0: f64) -> Vec<f64> {
    let mut out = vec![v0];
    let (mut v_prev, mut v, mut j) = (0.0, v0, j0);
    for n in 0..MAX_DERIVATIVES {
        let v_next = -m.lambda * v - m.a * n as f64 * v_prev + m.lambda * m.mu * j;
        let j_next = m.mu * j - v;
        if !(v_next.is_finite() && j_next.is_finite()) || v_next.abs() > 1e250 {
            break;
        }
        (v_prev, v, j) = (v, v_next, j_next);
        out.push(v);
    }
    out
}

pub fn appendix_solve(lambda: f64, mu: f64, a: f64) -> Result<AppendixSolution, SolveError> {
    let m = classify(lambda, mu, a)?;
    let k = m.k;
    let kf = k as f64;
    let frac = kf - m.sigma;

    let i_hi = i_integral(&m, frac)?;
    let (i_lo, b_km1) = if m.integer {
        let i0 = i_integral(&m, 0.0)?;
        (i0, a / i0)
    } else {
        let il = i_integral(&m, frac - 1.0)?;
        (il, a * frac * il / i_hi)
    };
    if !(i_hi > 0.0 && i_lo > 0.0 && b_km1.is_finite()) {
        return Err(SolveError::Degenerate(format!(
            "weighted integrals I = ({i_hi}, {i_lo}) are not positive"
        )));
    }

    let mut b = vec![0.0; k + 1];
    b[k] = 1.0;
    b[k - 1] = b_km1;
    for j in (2..=k).rev() {
        b[j - 2] = (j as f64 * a - mu * lambda) * b[j] + (mu + lambda) * b[j - 1];
    }

    let j_hi = growing_integral(&m, frac, mu)?;
    let (j_lo, r_k) = if m.integer {
        (None, (-m.a1(mu)).exp())
    } else {
        let jl = growing_integral(&m, frac - 1.0, mu)?;
        (Some(jl), frac * jl)
    };
    let poly: f64 = (1..k).map(|j| b[j] * mu.powi(j as i32)).sum();
    let denom = mu / (mu - lambda) * b[0]
        + poly
        + mu.powf(m.sigma) * (j_hi * b[k - 1] / a + r_k);
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(SolveError::Degenerate(format!("normalisation {denom} is not positive")));
    }
    let c_k = 1.0 / denom;
    let c: Vec<f64> = b.iter().map(|bk| bk * c_k).collect();
    let r1 = lambda * c[0];
    let ei = mu / a * c[0] + (1.0 - m.sigma) * c[1];

    let derivatives = density_derivatives(&m, a * ei + r1, c[0]);
    Ok(AppendixSolution { model: m, b, c, r1, ei, i_hi, i_lo, j_hi, j_lo, derivatives })
}

impl AppendixSolution {
    fn d(&self, j: usize) -> f64 {
        if j.is_multiple_of(2) {
            self.c[j]
        } else {
            -self.c[j]
        }
    }

    /// Inventory transform `φ₋(z) = ∫_0^∞ e^{−zx} v₋(x) dx` at real `z`.
    pub fn phi_minus(&self, z: f64) -> Result<f64, SolveError> {
        let m = &self.model;
        let k = m.k;
        let frac = k as f64 - m.sigma;
        if z < m.mu {
            let w = m.mu - z;
            let poly: f64 = (0..k).map(|j| self.c[j] * w.powi(j as i32)).sum();
            let mut br = self.c[k - 1] / m.a * growing_integral(m, frac, w)?;
            br += if m.integer {
                self.c[k] * (-m.a1(w)).exp()
            } else {
                frac * self.c[k] * growing_integral(m, frac - 1.0, w)?
            };
            Ok(poly + w.powf(m.sigma) * br)
        } else {
            let w = z - m.mu;
            let poly: f64 = (0..k).map(|j| self.d(j) * w.powi(j as i32)).sum();
            if w == 0.0 {
                return Ok(poly);
            }
            let mut br = self.d(k - 1) / m.a * g_real(m, frac, w)?;
            if !m.integer {
                br += frac * self.d(k) * g_real(m, frac - 1.0, w)?;
            }
            Ok(poly - w.powf(m.sigma) * br)
        }
    }

    /// `φ₋` at complex `z`, used for numerical inversion. `φ₋` is entire; the
    /// representation switches at `Re z = μ` like the real one.
    pub fn phi_minus_complex(&self, z: Complex64) -> Result<Complex64, SolveError> {
        if z.norm() > ASYMPTOTIC_MIN_MODULUS {
            if let Some(v) = self.phi_minus_asymptotic(z) {
                return Ok(v);
            }
        }
        let m = &self.model;
        let k = m.k;
        let frac = k as f64 - m.sigma;
        if z.re <= m.mu {
            let w = m.mu - z;
            let poly: Complex64 = (0..k).map(|j| self.c[j] * w.powi(j as i32)).sum();
            if w.norm() == 0.0 {
                return Ok(poly);
            }
            let mut br = self.c[k - 1] / m.a * growing_complex(m, frac, w)?;
            br += if m.integer {
                self.c[k] * (-a1_complex(m, w)).exp()
            } else {
                frac * self.c[k] * growing_complex(m, frac - 1.0, w)?
            };
            return Ok(poly + w.powf(m.sigma) * br);
        }
        let w = z - m.mu;
        let poly: Complex64 = (0..k).map(|j| self.d(j) * w.powi(j as i32)).sum();
        let mut br = self.d(k - 1) / m.a * g_complex(m, frac, z)?;
        if !m.integer {
            br += frac * self.d(k) * g_complex(m, frac - 1.0, z)?;
        }
        Ok(poly - w.powf(m.sigma) * br)
    }

    /// Inventory density for integer σ:
    /// `c_{K−1} a^{K/2} e^{−λx−ax²/2} He_K(√a x + (λ+μ)/√a)`.
    pub fn v_minus_integer(&self, x: f64) -> Result<f64, SolveError> {
        let m = &self.model;
        if !m.integer {
            return Err(SolveError::WrongRegime(format!(
                "closed-form density needs integer sigma, got {}",
                m.sigma
            )));
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        let sa = m.a.sqrt();
        let he = hermite_prob(m.k, sa * x + (m.lambda + m.mu) / sa);
        Ok(self.c[m.k - 1]
            * m.a.powf(0.5 * m.k as f64)
            * (-m.lambda * x - 0.5 * m.a * x * x).exp()
            * he)
    }

    /// Numerical inversion of `φ₋` along `Re z = γ`.
    pub fn v_minus_inversion(&self, x: f64, cfg: &BromwichConfig) -> Result<Inversion, SolveError> {
        let f = |z: Complex64| {
            self.phi_minus_complex(z)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        Ok(bromwich_invert(f, cfg, x)?)
    }

    /// Abscissa right of `μ`, where the transform is evaluated on rotated rays.
    pub fn default_inversion_config(&self) -> BromwichConfig {
        BromwichConfig::with_gamma(self.model.mu + 1.0)
    }

    /// Since `φ₋` is entire the abscissa may sit anywhere. With no floor the
    /// rule settles on `γx = A/2`, so `e^{γx}` never amplifies round-off in
    /// the tail.
    pub fn tail_inversion_config(&self) -> BromwichConfig {
        BromwichConfig::with_gamma(0.0)
    }

    /// Rigorous upper bound on `v₋(x)`. Level crossing gives
    /// `v₋(x) = ∫_x^∞ (λe^{−μ(y−x)} + ay) v₋(y) dy`, hence `T(x) = ∫_x^∞ v₋`
    /// obeys `−T′ ≥ axT`, so `T(x) ≤ φ₋(0) e^{−ax²/2}`; substituting back,
    /// `v₋(x) ≤ φ₋(0) e^{−ax²/2} (λ + ax + min(√(πa/2), 1/x))`.
    pub fn v_minus_bound(&self, x: f64) -> f64 {
        let m = &self.model;
        let mass = 1.0 - self.r1 / (m.mu - m.lambda);
        let gauss_tail = (0.5 * std::f64::consts::PI * m.a).sqrt().min(1.0 / x);
        mass * (-0.5 * m.a * x * x).exp() * (m.lambda + m.a * x + gauss_tail)
    }

    /// Taylor series of `v₋` at `0`. Differentiating the level-crossing
    /// equation gives, with `J(x) = ∫_x^∞ e^{−μ(y−x)} v₋(y) dy`,
    /// `v′ = −(λ + ax) v + λμ J` and `J′ = μJ − v`, started from
    /// `v(0) = a·E I + r₁` and `J(0) = φ₋(μ) = c₀`.
    pub fn v_minus_series(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut coeff = 1.0;
        for (n, d) in self.derivatives.iter().enumerate() {
            if n > 0 {
                coeff *= x / n as f64;
            }
            let term = d * coeff;
            sum += term;
            if n > 2 && term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    }

    /// `φ₋(z) ~ Σ v₋^{(n)}(0) / z^{n+1}` (Watson's lemma), summed until the
    /// terms fall below double precision; `None` if they never do. The series
    /// diverges (terms bottom out near `n ≈ |z|²/a`), so this succeeds only for
    /// `|z|² ≳ 80a`, which is where the expansion about `μ` cancels badly.
    pub fn phi_minus_asymptotic(&self, z: Complex64) -> Option<Complex64> {
        let inv = 1.0 / z;
        let mut zpow = inv;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, d) in self.derivatives.iter().enumerate() {
            let term = d * zpow;
            sum += term;
            if n > 2 && term.norm() <= 1e-17 * sum.norm() {
                return Some(sum);
            }
            zpow *= inv;
        }
        None
    }

    /// Inventory density: closed form for integer σ, otherwise the Taylor
    /// series near the origin and inversion beyond. Inverted values are
    /// confined to `[0, v_minus_bound(x)]`, which only removes round-off;
    /// where the bound is negligible nothing is inverted.
    pub fn v_minus(&self, x: f64) -> Result<f64, SolveError> {
        if self.model.integer {
            return self.v_minus_integer(x);
        }
        if x <= 0.0 {
            return Ok(if x < 0.0 { 0.0 } else { self.v_minus_at_zero() });
        }
        if x <= SERIES_MAX_X {
            return Ok(self.v_minus_series(x));
        }
        let bound = self.v_minus_bound(x);
        if bound < NEGLIGIBLE_DENSITY {
            return Ok(0.0);
        }
        let inv = self.v_minus_inversion(x, &self.tail_inversion_config())?;
        if inv.converged {
            Ok(inv.value.clamp(0.0, bound))
        } else {
            Err(SolveError::InversionTolerance { x, tail: inv.tail_estimate })
        }
    }

    /// `v₋(0) = lim z φ₋(z) = a·E I + r₁`, read off the leading order of the
    /// transform ODE at infinity.
    pub fn v_minus_at_zero(&self) -> f64 {
        self.model.a * self.ei + self.r1
    }

    pub fn v_plus(&self, x: f64) -> f64 {
        v_plus_linear(&self.model, self.r1, x)
    }

    pub fn summary(&self) -> LinearSummary {
        let m = &self.model;
        LinearSummary {
            lambda: m.lambda,
            mu: m.mu,
            a: m.a,
            sigma: m.sigma,
            k: m.k,
            c: self.c.clone(),
            r1: self.r1,
            ei: self.ei,
            route: "appendix".into(),
            near_integer_warning: m.near_integer,
        }
    }
}
