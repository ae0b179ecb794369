//! Globally adaptive Gauss-Kronrod (7/15) quadrature for real- and
//! complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{NumericsError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal panels the range is split into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 2000,
            initial_panels: 1,
        }
    }
}

impl QuadConfig {
    pub fn with_panels(mut self, n: usize) -> Self {
        self.initial_panels = n.max(1);
        self
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadResult<T> {
    /// The value if the requested tolerance was met, otherwise an error.
    pub fn require(self) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(NumericsError::QuadratureTolerance {
                estimate: self.value.magnitude(),
                error: self.error,
            })
        }
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T, F>(f: &F, a: f64, b: f64) -> (T, f64)
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut abs_sum = fc.magnitude() * WGK[7];
    let mut fv = [T::zero(); 14];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        let s = f1 + f2;
        kron = kron + s * WGK[j];
        abs_sum += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).magnitude() + (fv[2 * j + 1] - mean).magnitude());
    }
    let value = kron * h;
    let h_abs = h.abs();
    let res_abs = abs_sum * h_abs;
    let res_asc = asc * h_abs;
    let mut err = ((kron - gauss) * h).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a == b {
        return QuadResult {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let panels = cfg.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(cfg.max_intervals + panels);
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == panels { b } else { lo + width };
        let (v, e) = kronrod(&f, lo, hi);
        evaluations += 15;
        total = total + v;
        total_err += e;
        heap.push(Segment { a: lo, b: hi, value: v, error: e });
    }

    // Relative tolerances below the rounding floor of the rule are unattainable.
    let tol = |t: T| {
        cfg.abs_tol
            .max(cfg.rel_tol * t.magnitude())
            .max(100.0 * f64::EPSILON * t.magnitude())
    };
    while total_err > tol(total) && heap.len() < cfg.max_intervals {
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if !(m > seg.a.min(seg.b) && m < seg.a.max(seg.b)) {
            // Interval at rounding resolution; keep it and stop refining.
            heap.push(seg);
            break;
        }
        let (v1, e1) = kronrod(&f, seg.a, m);
        let (v2, e2) = kronrod(&f, m, seg.b);
        evaluations += 30;
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to remove drift from incremental updates.
    let mut value = T::zero();
    let mut error = 0.0;
    for s in heap.iter() {
        value = value + s.value;
        error += s.error;
    }
    QuadResult {
        value,
        error,
        evaluations,
        converged: error <= tol(value) && error.is_finite(),
    }
}

/// Integrate `f` over `[a, ∞)` via the map `x = a + t/(1-t)`, `t ∈ [0, 1)`.
pub fn integrate_to_inf<T, F>(f: F, a: f64, cfg: &QuadConfig) -> QuadResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let g = |t: f64| {
        let one_m = 1.0 - t;
        if one_m <= 0.0 {
            return T::zero();
        }
        let x = a + t / one_m;
        let v = f(x) * (1.0 / (one_m * one_m));
        if v.magnitude().is_finite() {
            v
        } else {
            T::zero()
        }
    };
    integrate(g, 0.0, 1.0, cfg)
}

/// Integrate a smooth, eventually decaying `f` over `[a, ∞)`: the range is cut
/// at the point where `f` has fallen far below its running maximum and the
/// finite piece is integrated with `panels` initial panels.
pub fn integrate_decaying<T, F>(f: F, a: f64, scale: f64, cfg: &QuadConfig) -> QuadResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut peak = f(a).magnitude();
    let mut hi = a + scale;
    let mut quiet = 0;
    for _ in 0..200 {
        let m = f(hi).magnitude();
        peak = peak.max(m);
        if m <= 1e-22 * peak || m == 0.0 {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        hi += (hi - a).max(scale);
    }
    let panels = cfg.initial_panels.max(((hi - a) / scale).ceil().min(64.0) as usize);
    integrate(f, a, hi, &cfg.with_panels(panels))
}
