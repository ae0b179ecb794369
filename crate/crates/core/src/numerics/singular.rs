//! Integrals of the form `∫_0^T v^p exp(E(v) - shift) dv` with `p > -1` and a
//! Gaussian-type exponent `E`. These are the building blocks of the linear
//! bankruptcy-rate solution.

use super::quad::{integrate, QuadConfig};
use super::{NumericsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSign {
    /// `E(v) = θ₁ v − θ₂ v²`
    Growing,
    /// `E(v) = −(θ₁ v + θ₂ v²)`
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularWeightIntegral {
    pub power: f64,
    pub linear: f64,
    pub quadratic: f64,
    /// `None` for an infinite upper limit.
    pub upper: Option<f64>,
    pub sign: WeightSign,
    /// Subtracted from the exponent; keeps large integrals representable.
    pub shift: f64,
}

impl SingularWeightIntegral {
    pub fn new(power: f64, linear: f64, quadratic: f64, upper: Option<f64>, sign: WeightSign) -> Self {
        Self {
            power,
            linear,
            quadratic,
            upper,
            sign,
            shift: 0.0,
        }
    }

    pub fn shifted(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    fn exponent(&self, v: f64) -> f64 {
        match self.sign {
            WeightSign::Growing => self.linear * v - self.quadratic * v * v,
            WeightSign::Decaying => -(self.linear * v + self.quadratic * v * v),
        }
    }

    fn log_integrand(&self, v: f64) -> f64 {
        let lp = if self.power == 0.0 { 0.0 } else { self.power * v.ln() };
        lp + self.exponent(v) - self.shift
    }

    fn validate(&self) -> Result<()> {
        if !(self.power > -1.0) || !self.power.is_finite() {
            return Err(NumericsError::Divergent(format!(
                "power {} is not > -1",
                self.power
            )));
        }
        if !(self.linear.is_finite() && self.quadratic.is_finite() && self.quadratic >= 0.0) {
            return Err(NumericsError::InvalidArgument(
                "weight coefficients must be finite with a nonnegative quadratic term".into(),
            ));
        }
        match self.upper {
            Some(t) if !(t >= 0.0 && t.is_finite()) => Err(NumericsError::InvalidArgument(format!(
                "upper limit {t} must be finite and nonnegative"
            ))),
            None => {
                let decays = self.quadratic > 0.0
                    || (self.sign == WeightSign::Decaying && self.linear > 0.0)
                    || (self.sign == WeightSign::Growing && self.linear < 0.0);
                if decays {
                    Ok(())
                } else {
                    Err(NumericsError::Divergent(
                        "infinite range with a non-decaying weight".into(),
                    ))
                }
            }
            _ => Ok(()),
        }
    }

    /// Finite cutoff beyond which the integrand is below `e^{-60}` of its peak.
    fn cutoff(&self) -> f64 {
        let mut v = 1.0;
        let mut peak = f64::NEG_INFINITY;
        let mut prev = self.log_integrand(0.5);
        for _ in 0..200 {
            let l = self.log_integrand(v);
            peak = peak.max(l).max(prev);
            if l < prev && l < peak - 60.0 {
                return v;
            }
            prev = l;
            v *= 2.0;
        }
        v
    }
}

/// Default: 8 initial panels, relative tolerance 1e-13.
pub fn singular_integral(spec: &SingularWeightIntegral) -> Result<f64> {
    singular_integral_with(spec, &QuadConfig::default().with_tol(1e-300, 1e-13).with_panels(8))
}

pub fn singular_integral_with(spec: &SingularWeightIntegral, cfg: &QuadConfig) -> Result<f64> {
    spec.validate()?;
    let upper = spec.upper.unwrap_or_else(|| spec.cutoff());
    if upper == 0.0 {
        return Ok(0.0);
    }
    let p = spec.power;
    let res = if p < 0.0 {
        // v = u^{1/(1+p)} turns v^p dv into du/(1+p).
        let q = 1.0 / (1.0 + p);
        let u_max = upper.powf(1.0 + p);
        integrate(
            |u: f64| {
                let v = u.powf(q);
                (spec.exponent(v) - spec.shift).exp() * q
            },
            0.0,
            u_max,
            cfg,
        )
    } else {
        integrate(|v: f64| spec.log_integrand(v).exp(), 0.0, upper, cfg)
    };
    let value = res.require()?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(NumericsError::Divergent("integral overflowed; increase shift".into()))
    }
}
