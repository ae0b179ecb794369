//! Service-requirement and claim-size distributions with rational
//! Laplace-Stieltjes transforms `β(s) = N(s)/D(s)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("transform evaluated within {distance:e} of a pole at s = {s}")]
    PoleProximity { s: Complex64, distance: f64 },
    #[error("numerator and denominator share the root {0}")]
    NotCoprime(Complex64),
    #[error("sampling is only available for exponential, Erlang and hyperexponential laws")]
    NotSamplable,
}

/// Serialisable description, as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Exponential { mu: f64 },
    Erlang { k: u32, mu: f64 },
    #[serde(rename = "hyperexp")]
    HyperExponential { p: Vec<f64>, mu: Vec<f64> },
    Rational { num: Vec<f64>, den: Vec<f64> },
}

/// A validated distribution together with its canonical rational form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistSpec", into = "DistSpec")]
pub struct ServiceDistribution {
    spec: DistSpec,
    num: Vec<f64>,
    den: Vec<f64>,
    mean: f64,
    poles: Vec<Complex64>,
}

const POLE_TOL: f64 = 1e-12;

impl ServiceDistribution {
    pub fn exponential(mu: f64) -> Result<Self, DistError> {
        DistSpec::Exponential { mu }.try_into()
    }

    pub fn erlang(k: u32, mu: f64) -> Result<Self, DistError> {
        DistSpec::Erlang { k, mu }.try_into()
    }

    pub fn hyperexponential(p: Vec<f64>, mu: Vec<f64>) -> Result<Self, DistError> {
        DistSpec::HyperExponential { p, mu }.try_into()
    }

    pub fn rational(num: Vec<f64>, den: Vec<f64>) -> Result<Self, DistError> {
        DistSpec::Rational { num, den }.try_into()
    }

    pub fn spec(&self) -> &DistSpec {
        &self.spec
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `(N, D)` in ascending powers, with `deg N < deg D` and `N(0) = D(0)`.
    pub fn rational_form(&self) -> (&[f64], &[f64]) {
        (&self.num, &self.den)
    }

    /// Zeros of `D`, i.e. the points `−μ_j`.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Smallest `|Re|` over the poles: the transform is analytic for
    /// `Re s > −decay_bound()`.
    pub fn decay_bound(&self) -> f64 {
        self.poles
            .iter()
            .map(|p| -p.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// `β(s)` at complex `s`.
    pub fn lst(&self, s: Complex64) -> Result<Complex64, DistError> {
        let nearest = self
            .poles
            .iter()
            .map(|p| (s - p).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest < POLE_TOL * (1.0 + s.norm()) {
            return Err(DistError::PoleProximity { s, distance: nearest });
        }
        Ok(match &self.spec {
            DistSpec::Exponential { mu } => *mu / (*mu + s),
            DistSpec::Erlang { k, mu } => (*mu / (*mu + s)).powu(*k),
            DistSpec::HyperExponential { p, mu } => p
                .iter()
                .zip(mu)
                .map(|(&pi, &mi)| pi * mi / (mi + s))
                .sum(),
            DistSpec::Rational { .. } => poly::eval_c(&self.num, s) / poly::eval_c(&self.den, s),
        })
    }

    /// `β(s)` for real `s` right of every pole.
    pub fn lst_real(&self, s: f64) -> f64 {
        match &self.spec {
            DistSpec::Exponential { mu } => mu / (mu + s),
            DistSpec::Erlang { k, mu } => (mu / (mu + s)).powi(*k as i32),
            DistSpec::HyperExponential { p, mu } => {
                p.iter().zip(mu).map(|(&pi, &mi)| pi * mi / (mi + s)).sum()
            }
            DistSpec::Rational { .. } => poly::eval(&self.num, s) / poly::eval(&self.den, s),
        }
    }

    /// Density, when the law has a closed-form one.
    pub fn density(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        match &self.spec {
            DistSpec::Exponential { mu } => Some(mu * (-mu * x).exp()),
            DistSpec::Erlang { k, mu } => {
                let k = *k as i32;
                let log_fact: f64 = (1..k).map(|j| (j as f64).ln()).sum();
                if x == 0.0 {
                    return Some(if k == 1 { *mu } else { 0.0 });
                }
                Some((k as f64 * mu.ln() + (k - 1) as f64 * x.ln() - mu * x - log_fact).exp())
            }
            DistSpec::HyperExponential { p, mu } => Some(
                p.iter()
                    .zip(mu)
                    .map(|(&pi, &mi)| pi * mi * (-mi * x).exp())
                    .sum(),
            ),
            DistSpec::Rational { .. } => None,
        }
    }

    /// `P(B > x)`, when available in closed form.
    pub fn survival(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return Some(1.0);
        }
        match &self.spec {
            DistSpec::Exponential { mu } => Some((-mu * x).exp()),
            DistSpec::Erlang { k, mu } => {
                let mut term = (-mu * x).exp();
                let mut sum = term;
                for n in 1..*k {
                    term *= mu * x / n as f64;
                    sum += term;
                }
                Some(sum)
            }
            DistSpec::HyperExponential { p, mu } => {
                Some(p.iter().zip(mu).map(|(&pi, &mi)| pi * (-mi * x).exp()).sum())
            }
            DistSpec::Rational { .. } => None,
        }
    }

    pub fn sampler(&self) -> Result<Sampler, DistError> {
        match &self.spec {
            DistSpec::Exponential { mu } => Ok(Sampler::Exponential { rate: *mu }),
            DistSpec::Erlang { k, mu } => Ok(Sampler::Erlang { k: *k, rate: *mu }),
            DistSpec::HyperExponential { p, mu } => {
                let mut cum = Vec::with_capacity(p.len());
                let mut acc = 0.0;
                for &pi in p {
                    acc += pi;
                    cum.push(acc);
                }
                // Guard against rounding in the last cumulative weight.
                if let Some(last) = cum.last_mut() {
                    *last = f64::INFINITY;
                }
                Ok(Sampler::HyperExponential {
                    cumulative: cum,
                    rates: mu.clone(),
                })
            }
            DistSpec::Rational { .. } => Err(DistError::NotSamplable),
        }
    }

    /// One draw; fails for the general rational form.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, DistError> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Exact sampler for the phase-type variants.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Exponential { rate: f64 },
    Erlang { k: u32, rate: f64 },
    HyperExponential { cumulative: Vec<f64>, rates: Vec<f64> },
}

pub(crate) fn std_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 − U lies in (0, 1], so the logarithm is finite.
    -(1.0 - rng.random::<f64>()).ln()
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exponential { rate } => std_exponential(rng) / rate,
            Sampler::Erlang { k, rate } => (0..*k).map(|_| std_exponential(rng)).sum::<f64>() / rate,
            Sampler::HyperExponential { cumulative, rates } => {
                let u = rng.random::<f64>();
                let i = cumulative.iter().position(|&c| u < c).unwrap_or(rates.len() - 1);
                std_exponential(rng) / rates[i]
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, DistError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(DistError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn binomial_power(mu: f64, k: u32) -> Vec<f64> {
    // (μ + s)^k
    let mut out = vec![1.0];
    for _ in 0..k {
        out = poly::mul(&out, &[mu, 1.0]);
    }
    out
}

impl TryFrom<DistSpec> for ServiceDistribution {
    type Error = DistError;

    fn try_from(spec: DistSpec) -> Result<Self, DistError> {
        let (num, den, mean) = match &spec {
            DistSpec::Exponential { mu } => {
                let mu = positive("mu", *mu)?;
                (vec![mu], vec![mu, 1.0], 1.0 / mu)
            }
            DistSpec::Erlang { k, mu } => {
                let mu = positive("mu", *mu)?;
                if *k == 0 {
                    return Err(DistError::InvalidParameter("Erlang phases k must be >= 1".into()));
                }
                (vec![mu.powi(*k as i32)], binomial_power(mu, *k), *k as f64 / mu)
            }
            DistSpec::HyperExponential { p, mu } => {
                if p.is_empty() || p.len() != mu.len() {
                    return Err(DistError::InvalidParameter(
                        "hyperexponential p and mu must be nonempty and of equal length".into(),
                    ));
                }
                for (&pi, &mi) in p.iter().zip(mu) {
                    positive("p", pi)?;
                    positive("mu", mi)?;
                }
                for (i, &mi) in mu.iter().enumerate() {
                    if mu[..i].iter().any(|&mj| (mj - mi).abs() <= 1e-12 * mi) {
                        return Err(DistError::InvalidParameter(
                            "hyperexponential rates must be distinct".into(),
                        ));
                    }
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(DistError::InvalidParameter(format!(
                        "hyperexponential weights sum to {total}, not 1"
                    )));
                }
                let den = mu.iter().fold(vec![1.0], |acc, &m| poly::mul(&acc, &[m, 1.0]));
                let mut num = vec![0.0];
                for (i, (&pi, &mi)) in p.iter().zip(mu).enumerate() {
                    let others = mu
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .fold(vec![1.0], |acc, (_, &m)| poly::mul(&acc, &[m, 1.0]));
                    num = poly::axpby(1.0, &num, pi * mi, &others);
                }
                let mean = p.iter().zip(mu).map(|(&pi, &mi)| pi / mi).sum();
                (num, den, mean)
            }
            DistSpec::Rational { num, den } => {
                let den = poly::trim(den);
                let num = poly::trim(num);
                if den.len() < 2 {
                    return Err(DistError::InvalidParameter("denominator degree must be >= 1".into()));
                }
                if num.len() >= den.len() {
                    return Err(DistError::InvalidParameter(
                        "numerator degree must be below denominator degree".into(),
                    ));
                }
                if num.iter().chain(&den).any(|c| !c.is_finite()) {
                    return Err(DistError::InvalidParameter("coefficients must be finite".into()));
                }
                let d0 = den[0];
                if d0 == 0.0 || (num[0] - d0).abs() > 1e-12 * d0.abs() {
                    return Err(DistError::InvalidParameter(format!(
                        "beta(0) = N(0)/D(0) must equal 1, got {}/{}",
                        num[0], d0
                    )));
                }
                let n1 = num.get(1).copied().unwrap_or(0.0);
                let mean = (den[1] - n1) / d0;
                if !(mean > 0.0) {
                    return Err(DistError::InvalidParameter(format!("mean {mean} must be positive")));
                }
                (num, den, mean)
            }
        };
        let poles = poly::roots(&den)
            .map_err(|e| DistError::InvalidParameter(format!("denominator roots: {e}")))?;
        if let Some(p) = poles.iter().find(|p| p.re >= 0.0) {
            return Err(DistError::InvalidParameter(format!(
                "denominator has a zero at {p} in the closed right half-plane"
            )));
        }
        if matches!(spec, DistSpec::Rational { .. }) {
            let scale: f64 = num.iter().map(|c| c.abs()).sum();
            for &p in &poles {
                let scale_p = scale * (1.0 + p.norm()).powi(num.len() as i32);
                if poly::eval_c(&num, p).norm() < 1e-9 * scale_p {
                    return Err(DistError::NotCoprime(p));
                }
            }
            let dist = Self { spec: spec.clone(), num: num.clone(), den: den.clone(), mean, poles: poles.clone() };
            for k in 0..64 {
                let s = Complex64::new(0.0, 0.25 * k as f64 * (1.0 + k as f64));
                if dist.lst(s)?.norm() > 1.0 + 1e-9 {
                    return Err(DistError::InvalidParameter(format!(
                        "|beta(s)| exceeds 1 at s = {s}; not a transform of a distribution"
                    )));
                }
            }
        }
        Ok(Self { spec, num, den, mean, poles })
    }
}

impl From<ServiceDistribution> for DistSpec {
    fn from(d: ServiceDistribution) -> Self {
        d.spec
    }
}
