//! Dense polynomials with real coefficients in ascending-power order.

use num_complex::Complex64;

use super::{NumericsError, Result};

pub fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_c(p: &[f64], z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn eval_cc(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `alpha * p + beta * q`.
pub fn axpby(alpha: f64, p: &[f64], beta: f64, q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| alpha * p.get(k).copied().unwrap_or(0.0) + beta * q.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// Multiply by `s` (shift coefficients up one power).
pub fn mul_s(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(0.0);
    out.extend_from_slice(p);
    out
}

/// Remove trailing (highest-power) coefficients that are zero relative to the
/// largest coefficient.
pub fn trim(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut n = p.len();
    while n > 1 && p[n - 1].abs() <= 1e-300_f64.max(scale * 1e-15) {
        n -= 1;
    }
    p[..n].to_vec()
}

pub fn degree(p: &[f64]) -> usize {
    trim(p).len().saturating_sub(1)
}

/// Coefficients of the Taylor expansion of `p` about `z0`:
/// `p(z0 + h) = sum_k t_k h^k`.
pub fn taylor_at(p: &[f64], z0: Complex64) -> Vec<Complex64> {
    let mut t: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let n = t.len();
    // Repeated synthetic division (Horner shift).
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let carry = t[j + 1] * z0;
            t[j] += carry;
        }
    }
    t
}

/// Divide two power series `num / den` (ascending order), returning `terms`
/// coefficients. `den[0]` must be nonzero.
pub fn series_div(num: &[Complex64], den: &[Complex64], terms: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut q = vec![zero; terms];
    for k in 0..terms {
        let mut acc = num.get(k).copied().unwrap_or(zero);
        for j in 0..k {
            acc -= q[j] * den.get(k - j).copied().unwrap_or(zero);
        }
        q[k] = acc / den[0];
    }
    q
}

/// All complex roots of `p` by the Aberth-Ehrlich simultaneous iteration.
pub fn roots(p: &[f64]) -> Result<Vec<Complex64>> {
    let p = trim(p);
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p[n];
    let monic: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    let dmonic: Vec<Complex64> = (1..=n).map(|k| monic[k] * k as f64).collect();

    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, th)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let pv = eval_cc(&monic, z[i]);
            let dv = eval_cc(&dmonic, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    sum += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // Accept if residuals are tiny even though steps have stalled at rounding level.
    let ok = z
        .iter()
        .all(|&r| eval_cc(&monic, r).norm() < 1e-9 * (1.0 + r.norm()).powi(n as i32));
    if ok {
        Ok(z)
    } else {
        Err(NumericsError::NoConvergence {
            what: "polynomial roots",
            iterations: 500,
        })
    }
}
