use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use whkernel::constant_omega::{solve_insurance, solve_queue, ConstantOmegaSummary};
use whkernel::dist::ServiceDistribution;
use whkernel::simulate::SimConfig;

/// Positive real zero of `λ(μ/(μ+s))^k + s − λ − ω`, found as an eigenvalue of
/// the companion matrix of `λμ^k + (s − λ − ω)(μ + s)^k`.
fn erlang_delta_by_eigenvalues(lambda: f64, omega: f64, k: u32, mu: f64) -> f64 {
    // (μ + s)^k, ascending powers.
    let mut p = vec![1.0];
    for _ in 0..k {
        let mut next = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += mu * c;
            next[i + 1] += c;
        }
        p = next;
    }
    let mut poly = vec![0.0; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        poly[i] += -(lambda + omega) * c;
        poly[i + 1] += c;
    }
    poly[0] += lambda * mu.powi(k as i32);
    let n = poly.len() - 1;
    let lead = poly[n];
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -poly[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let positive: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9 && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    assert_eq!(positive.len(), 1, "expected a single positive zero, got {positive:?}");
    positive[0]
}

#[test]
fn erlang_delta_matches_companion_eigenvalue() {
    for &(lambda, omega, k, mu) in &[(1.0, 1.0, 2, 4.0), (0.5, 3.0, 3, 2.0), (2.0, 0.2, 5, 12.0)] {
        let dist = ServiceDistribution::erlang(k, mu).unwrap();
        let sol = solve_queue(lambda, omega, &dist).unwrap();
        let oracle = erlang_delta_by_eigenvalues(lambda, omega, k, mu);
        assert!((sol.delta - oracle).abs() < 1e-10 * oracle, "k={k}: {} vs {oracle}", sol.delta);
    }
}

#[test]
fn summary_round_trips_through_json() {
    let dist = ServiceDistribution::hyperexponential(vec![0.4, 0.6], vec![1.0, 3.0]).unwrap();
    let sol = solve_insurance(1.0, 1.5, 0.7, &dist).unwrap();
    let text = serde_json::to_string(&sol.summary()).unwrap();
    let back: ConstantOmegaSummary = serde_json::from_str(&text).unwrap();
    assert_eq!(back, sol.summary());
}

#[test]
fn sim_config_round_trips_through_json() {
    let cfg = SimConfig { seed: 42, threshold: Some(17.5), ..SimConfig::default() };
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<SimConfig>(&text).unwrap(), cfg);
    // Missing fields take their defaults.
    let partial: SimConfig = serde_json::from_str(r#"{"seed": 9}"#).unwrap();
    assert_eq!(partial, SimConfig { seed: 9, ..SimConfig::default() });
}

proptest! {
    #[test]
    fn queue_masses_add_up(lambda in 0.1f64..3.0, omega in 0.05f64..5.0, rho in 0.05f64..0.95, k in 1u32..5) {
        let mu = k as f64 * lambda / rho;
        let dist = ServiceDistribution::erlang(k, mu).unwrap();
        let sol = solve_queue(lambda, omega, &dist).unwrap();
        prop_assert!(sol.delta > 0.0);
        prop_assert!((sol.phi_minus_0() + sol.phi_plus_0() - 1.0).abs() < 1e-9);
        prop_assert!(sol.phi_minus_0() > 0.0 && sol.phi_minus_0() < 1.0);
        // δ is a zero of λβ(s) + s − λ − ω.
        let f = lambda * dist.lst_real(sol.delta) + sol.delta - lambda - omega;
        prop_assert!(f.abs() < 1e-10 * (lambda + omega));
        prop_assert!(sol.v_plus_at_zero() >= 0.0);
    }

    #[test]
    fn transform_at_zero_is_mass(lambda in 0.1f64..3.0, omega in 0.05f64..5.0, rho in 0.05f64..0.95) {
        let dist = ServiceDistribution::exponential(lambda / rho).unwrap();
        let sol = solve_queue(lambda, omega, &dist).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        prop_assert!((sol.phi_minus(zero).re - sol.phi_minus_0()).abs() < 1e-12);
        prop_assert!((sol.phi_plus(zero).re - sol.phi_plus_0()).abs() < 1e-12);
    }

    #[test]
    fn bankruptcy_probability_is_a_probability(
        lambda in 0.2f64..2.0,
        omega in 0.05f64..5.0,
        load in 0.1f64..0.9,
        x in 0.0f64..20.0,
    ) {
        let dist = ServiceDistribution::exponential(1.0).unwrap();
        let c = lambda / load;
        let sol = solve_insurance(lambda, c, omega, &dist).unwrap();
        let p = sol.bankruptcy_probability(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p), "p = {}", p);
        prop_assert!(p <= sol.bankruptcy_probability(0.0).unwrap() + 1e-9);
    }
}
