//! Probabilists' Hermite polynomials `He_n`, weight `e^{-x²/2}`.

/// `He_n(x)` by the three-term recurrence `He_{k+1} = x He_k − k He_{k−1}`.
pub fn hermite_prob(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `[He_0(x), …, He_n(x)]`.
pub fn hermite_prob_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let next = x * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}
