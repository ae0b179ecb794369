//! Kummer confluent hypergeometric functions `M(a, b, z)` and `U(a, b, z)` for
//! real parameters and real `z`.
//!
//! `U` is evaluated by whichever of four routes is accurate for the argument:
//! terminating polynomial (`a` a nonpositive integer), the large-`z` asymptotic
//! series when its smallest term is negligible, the connection formula through
//! `M` for small `z`, and otherwise the Laplace-type integral at `a₀ ∈ (0, 1]`
//! and `a₀ + 1` followed by the three-term recurrence downward in `a`.

use statrs::function::gamma::gamma;

use super::quad::{integrate_decaying, QuadConfig};
use super::{NumericsError, Result};

const MAX_TERMS: usize = 20_000;
/// Below this `z` the connection formula is used for `U`.
const CONNECTION_MAX_Z: f64 = 4.0;

fn is_nonpositive_integer(x: f64) -> Option<u32> {
    if x <= 0.0 && (x - x.round()).abs() < 1e-13 && x > -1e6 {
        Some((-x.round()) as u32)
    } else {
        None
    }
}

/// `M(a, b, z) = Σ (a)_k / (b)_k · z^k / k!`.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b).is_some() {
        return Err(NumericsError::InvalidArgument(format!(
            "M(a, b, z) undefined for b = {b}"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut abs_sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        abs_sum += term.abs();
        if term == 0.0 {
            return Ok(sum);
        }
        // Past the last sign change of (a)_k and with terms shrinking.
        if kf > -a && kf > -b && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            if abs_sum > 1e12 * sum.abs() {
                return Err(NumericsError::NoConvergence {
                    what: "kummer_m (cancellation)",
                    iterations: k,
                });
            }
            return Ok(sum);
        }
    }
    Err(NumericsError::NoConvergence {
        what: "kummer_m",
        iterations: MAX_TERMS,
    })
}

/// `U(a, b, z)` for `z > 0`.
pub fn kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(NumericsError::InvalidArgument(format!(
            "U(a, b, z) requires z > 0, got {z}"
        )));
    }
    if let Some(n) = is_nonpositive_integer(a) {
        return kummer_u_polynomial(n, b, z);
    }
    if let Some(v) = kummer_u_asymptotic(a, b, z) {
        return Ok(v);
    }
    if z <= CONNECTION_MAX_Z && is_integer(b).is_none() {
        return kummer_u_connection(a, b, z);
    }
    kummer_u_integral(a, b, z)
}

/// `U′(a, b, z) = −a · U(a + 1, b + 1, z)`.
pub fn kummer_u_prime(a: f64, b: f64, z: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(-a * kummer_u(a + 1.0, b + 1.0, z)?)
}

fn is_integer(x: f64) -> Option<i64> {
    if (x - x.round()).abs() < 1e-13 {
        Some(x.round() as i64)
    } else {
        None
    }
}

/// `U(−n, b, z) = (−1)^n (b)_n M(−n, b, z)`.
fn kummer_u_polynomial(n: u32, b: f64, z: f64) -> Result<f64> {
    // Expanded as Σ_k (−1)^{n+k} C(n,k) (b+k)_{n−k} z^k, which stays finite
    // when (b)_k vanishes for a nonpositive integer b.
    let nf = n as f64;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        let kf = k as f64;
        if k > 0 {
            binom *= (nf - kf + 1.0) / kf;
        }
        let mut poch = 1.0;
        for j in k..n {
            poch *= b + j as f64;
        }
        let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * binom * poch * z.powi(k as i32);
    }
    Ok(sum)
}

/// Large-`z` asymptotic series `z^{−a} Σ (a)_s (a−b+1)_s / s! · (−z)^{−s}`,
/// returned only when its smallest term is below double precision.
pub fn kummer_u_asymptotic(a: f64, b: f64, z: f64) -> Option<f64> {
    let c = a - b + 1.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for s in 0..400 {
        let sf = s as f64;
        let next = term * (a + sf) * (c + sf) / ((sf + 1.0) * (-z));
        if next == 0.0 {
            return Some(sum * z.powf(-a));
        }
        if next.abs() >= term.abs() && sf > (a.abs() + c.abs()) {
            // Terms started growing before reaching precision.
            return None;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(sum * z.powf(-a));
        }
    }
    None
}

/// `U = Γ(1−b)/Γ(a−b+1) M(a,b,z) + Γ(b−1)/Γ(a) z^{1−b} M(a−b+1, 2−b, z)`,
/// valid for non-integer `b`.
pub fn kummer_u_connection(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_integer(b).is_some() {
        return Err(NumericsError::InvalidArgument(format!(
            "connection formula needs non-integer b, got {b}"
        )));
    }
    let t1 = if is_nonpositive_integer(a - b + 1.0).is_some() {
        0.0
    } else {
        gamma(1.0 - b) / gamma(a - b + 1.0) * kummer_m(a, b, z)?
    };
    let t2 = if is_nonpositive_integer(a).is_some() {
        0.0
    } else {
        gamma(b - 1.0) / gamma(a) * z.powf(1.0 - b) * kummer_m(a - b + 1.0, 2.0 - b, z)?
    };
    Ok(t1 + t2)
}

/// `U(α, b, z) = Γ(α)^{-1} ∫_0^∞ e^{−zt} t^{α−1} (1+t)^{b−α−1} dt` for `α > 0`.
fn u_laplace_integral(alpha: f64, b: f64, z: f64) -> Result<f64> {
    let cfg = QuadConfig::default().with_tol(1e-300, 1e-13).with_panels(8);
    let value = if alpha < 1.0 {
        // t = u^{1/α} removes the t^{α−1} endpoint singularity.
        let q = 1.0 / alpha;
        let scale = (1.0 / z).powf(alpha);
        integrate_decaying(
            |u: f64| {
                let t = u.powf(q);
                (-z * t + (b - alpha - 1.0) * t.ln_1p()).exp() * q
            },
            0.0,
            scale,
            &cfg,
        )
        .require()?
    } else {
        integrate_decaying(
            |t: f64| {
                if t == 0.0 {
                    return if alpha == 1.0 { 1.0 } else { 0.0 };
                }
                (-z * t + (alpha - 1.0) * t.ln() + (b - alpha - 1.0) * t.ln_1p()).exp()
            },
            0.0,
            1.0 / z,
            &cfg,
        )
        .require()?
    };
    Ok(value / gamma(alpha))
}

/// Integral representation at `a₀ = a − ⌈a⌉ + 1 ∈ (0, 1]` and `a₀ + 1`, then
/// `U(a−1) = (z + 2a − b) U(a) − a(a − b + 1) U(a+1)` downward to `a`.
pub fn kummer_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    if a > 0.0 {
        return u_laplace_integral(a, b, z);
    }
    let mut steps = (-a).ceil() as i64;
    if a + steps as f64 <= 0.0 {
        steps += 1;
    }
    let a0 = a + steps as f64;
    let mut u_hi = u_laplace_integral(a0 + 1.0, b, z)?;
    let mut u = u_laplace_integral(a0, b, z)?;
    let mut cur = a0;
    for _ in 0..steps {
        let lower = (z + 2.0 * cur - b) * u - cur * (cur - b + 1.0) * u_hi;
        u_hi = u;
        u = lower;
        cur -= 1.0;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermite_phys(n: usize, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        if n == 0 {
            return h0;
        }
        for k in 1..n {
            let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    }

    #[test]
    fn m_at_zero_and_closed_forms() {
        assert_eq!(kummer_m(1.3, 0.5, 0.0).unwrap(), 1.0);
        // M(a, a, z) = e^z
        let v = kummer_m(0.7, 0.7, 2.5).unwrap();
        assert!((v - 2.5f64.exp()).abs() < 1e-13 * v);
        assert!(kummer_m(1.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn u_terminating_cases() {
        for &z in &[0.1, 1.0, 7.5, 50.0] {
            assert_eq!(kummer_u(0.0, 0.5, z).unwrap(), 1.0);
            let v = kummer_u(-1.0, 0.5, z).unwrap();
            assert!((v - (z - 0.5)).abs() < 1e-13 * (1.0 + z));
        }
    }

    #[test]
    fn u_half_integer_reduces_to_hermite() {
        // U(−n/2, 1/2, x²) = 2^{−n} H_n(x) with physicists' H_n.
        for n in [1usize, 2, 3, 5, 7] {
            for &x in &[0.3, 0.9, 1.5, 2.0, 2.8, 4.0, 7.0, 40.0] {
                let want = hermite_phys(n, x) / 2f64.powi(n as i32);
                let got = kummer_u(-(n as f64) / 2.0, 0.5, x * x).unwrap();
                assert!(
                    (got - want).abs() < 1e-10 * want.abs().max(1.0),
                    "n={n} x={x} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn routes_agree_in_overlap() {
        for &a in &[-1.65, -0.85, -0.25, 0.4, 1.3] {
            for &z in &[0.5, 1.5, 3.0, 6.0] {
                let c = kummer_u_connection(a, 0.5, z).unwrap();
                let i = kummer_u_integral(a, 0.5, z).unwrap();
                assert!((c - i).abs() < 1e-10 * c.abs().max(1.0), "a={a} z={z} {c} {i}");
            }
        }
        let i = kummer_u_integral(-1.65, 0.5, 60.0).unwrap();
        let s = kummer_u_asymptotic(-1.65, 0.5, 60.0).unwrap();
        assert!((i - s).abs() < 1e-11 * s.abs());
    }

    #[test]
    fn reference_values_beyond_connection_range() {
        // mpmath hyperu at 30 digits
        let refs = [
            (1.3, 0.041_104_371_335_601_56),
            (-1.65, 36.233_470_660_512_66),
            (-0.85, 6.869_813_389_302_223),
            (-0.25, 1.788_929_281_215_360_5),
        ];
        for (a, want) in refs {
            let got = kummer_u(a, 0.5, 10.0).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "a={a} {got}");
        }
    }

    #[test]
    fn large_z_behaves_like_power() {
        let z = 1e4;
        let v = kummer_u(-1.65, 0.5, z).unwrap();
        assert!((v / z.powf(1.65) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for &(a, z) in &[(-1.65, 1.125), (-0.25, 2.25), (-1.65, 8.0), (-0.85, 30.0)] {
            let fd = (kummer_u(a, 0.5, z + h).unwrap() - kummer_u(a, 0.5, z - h).unwrap()) / (2.0 * h);
            let d = kummer_u_prime(a, 0.5, z).unwrap();
            assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "a={a} z={z} {fd} {d}");
        }
    }
}
