use super::{NumericsError, Result};

const MAX_ITER: usize = 400;

/// Root of a continuous, strictly monotone `f` on `[lo, hi]`.
///
/// Illinois-modified regula falsi with a bisection safeguard; iterates until the
/// bracket has shrunk to a few ulps of the root so the result does not depend
/// on the starting bracket.
pub fn find_root_monotone<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(NumericsError::InvalidArgument(format!(
            "bad bracket [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(NumericsError::NoSignChange { lo, hi });
    }

    // 0 = left endpoint retained last step, 1 = right
    let mut side = -1i32;
    for _ in 0..MAX_ITER {
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        // Keep the false-position step away from the endpoints; otherwise bisect.
        let guard = 0.01 * width;
        if !(x > a + guard && x < b - guard) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == 0 {
                fb *= 0.5;
            }
            side = 0;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        // Alternate with a pure bisection once the bracket is small relative to
        // the root so the final ulps are located by sign alone.
        if (b - a) < 1e-10 * a.abs().max(b.abs()).max(1.0) {
            return Ok(bisect(&f, a, b));
        }
    }
    Err(NumericsError::NoConvergence {
        what: "find_root_monotone",
        iterations: MAX_ITER,
    })
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let sa = f(a).signum();
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Grow `hi` by doubling until `f(hi)` has the sign opposite to `f(lo)`.
pub fn expand_bracket<F>(f: F, lo: f64, hi: f64, max_doublings: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let mut hi = hi;
    for _ in 0..=max_doublings {
        let fhi = f(hi);
        if fhi.signum() != flo.signum() || fhi == 0.0 {
            return Ok((lo, hi));
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(NumericsError::NoSignChange { lo, hi })
}
