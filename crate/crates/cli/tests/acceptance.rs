//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line followed by the individual checks that make it up.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whkernel::constant_omega::{solve_insurance, solve_queue};
use whkernel::dist::ServiceDistribution;
use whkernel::linear_omega::{appendix_solve, direct_solve, DirectRoute};
use whkernel::numerics::kummer::{kummer_u_connection, kummer_u_integral};
use whkernel::numerics::{
    bromwich_invert, hermite_prob_all, kummer_u, singular::singular_integral_with, BromwichConfig, QuadConfig,
    SingularWeightIntegral, WeightSign,
};
use whkernel::residual;
use whkernel::simulate::{simulate_bankruptcy, simulate_workload, RateSpec, SimConfig};

struct Report {
    criterion: u32,
    started: Instant,
    limit_secs: f64,
    checks: Vec<(String, bool)>,
}

impl Report {
    fn new(criterion: u32, limit_secs: f64) -> Self {
        Self { criterion, started: Instant::now(), limit_secs, checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks.push((what.into(), ok));
    }

    /// `|got − want| < tol`
    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(err < tol, format!("{label}: {got:.12e} vs {want:.12e} (|err| {err:.2e} < {tol:.0e})"));
    }

    fn finish(mut self) {
        let secs = self.started.elapsed().as_secs_f64();
        self.check(secs < self.limit_secs, format!("runtime {secs:.2}s < {}s", self.limit_secs));
        let pass = self.checks.iter().all(|c| c.1);
        println!("criterion {}: {}", self.criterion, if pass { "PASS" } else { "FAIL" });
        for (what, ok) in &self.checks {
            println!("  [{}] {what}", if *ok { "ok" } else { "FAILED" });
        }
        assert!(pass, "criterion {} failed", self.criterion);
    }
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn long_run(seed: u64) -> SimConfig {
    // 16 × 625 000 time units: at least 10⁷ arrivals at λ = 1.
    SimConfig { seed, replications: 16, time: 625_000.0, ..Default::default() }
}

#[test]
fn criterion_01_constant_queue_exponential() {
    let mut r = Report::new(1, 1.0);
    let (lambda, mu, omega) = (1.0, 2.0, 2.0);
    let s = solve_queue(lambda, omega, &ServiceDistribution::exponential(mu).unwrap()).unwrap();
    // s² + (μ−λ−ω)s − μω = 0
    let b = mu - lambda - omega;
    let delta = (-b + (b * b + 4.0 * mu * omega).sqrt()) / 2.0;
    r.close("δ vs (1+√17)/2", s.delta, (1.0 + 17f64.sqrt()) / 2.0, 1e-12);
    r.close("δ vs quadratic zero", s.delta, delta, 1e-12);
    let rho = lambda / mu;
    r.close("A = (1−ρ)δ²/ω", s.a, (1.0 - rho) * delta * delta / omega, 1e-12);
    r.close("φ₋(0)+φ₊(0)", s.phi_minus_0() + s.phi_plus_0(), 1.0, 1e-12);
    r.finish();
}

fn workload_case(r: &mut Report, name: &str, dist: ServiceDistribution, seed: u64) {
    let (lambda, omega) = (1.0, 2.0);
    let s = solve_queue(lambda, omega, &dist).unwrap();
    let t = Instant::now();
    let est = simulate_workload(lambda, &dist, RateSpec::Constant { omega }, &long_run(seed)).unwrap();
    let vm = |x: f64| s.v_minus(x);
    let vp = |x: f64| s.v_plus(x).unwrap();
    let l1 = est.inventory.l1_distance(&vm, s.phi_minus_0()) + est.workload.l1_distance(&vp, 1.0 - s.phi_minus_0());
    r.check(est.events >= 10_000_000, format!("{name}: {} events ≥ 10⁷", est.events));
    r.check(l1 < 0.02, format!("{name}: L1(v₋, v₊) = {l1:.5} < 0.02"));
    let z = est.phi_minus_0.z_score(s.phi_minus_0());
    r.check(
        z.abs() <= 3.0,
        format!("{name}: φ̂₋(0) = {:.5} ± {:.1e} vs {:.5} (z = {z:.2})", est.phi_minus_0.mean, est.phi_minus_0.stderr, s.phi_minus_0()),
    );
    let secs = t.elapsed().as_secs_f64();
    r.check(secs < 180.0, format!("{name}: case runtime {secs:.1}s < 180s"));
}

#[test]
fn criterion_02_wiener_hopf_vs_simulation() {
    let mut r = Report::new(2, 360.0);
    workload_case(&mut r, "exponential(2)", ServiceDistribution::exponential(2.0).unwrap(), 11);
    workload_case(&mut r, "erlang(2,4)", ServiceDistribution::erlang(2, 4.0).unwrap(), 12);
    r.finish();
}

#[test]
fn criterion_03_factorization_identity() {
    let mut r = Report::new(3, 5.0);
    let lambda = 1.0;
    let omega = 2.0;
    let laws: [(&str, ServiceDistribution, Box<dyn Fn(Complex64) -> Complex64>); 2] = [
        ("exponential(2)", ServiceDistribution::exponential(2.0).unwrap(), Box::new(|s| 2.0 / (2.0 + s))),
        ("erlang(2,4)", ServiceDistribution::erlang(2, 4.0).unwrap(), Box::new(|s| (4.0 / (4.0 + s)).powi(2))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (name, dist, beta) in &laws {
        let sol = solve_queue(lambda, omega, dist).unwrap();
        let d = sol.delta;
        let bd = beta(Complex64::new(d, 0.0)).re;
        r.close(&format!("{name}: δ solves λβ(δ)+δ−λ−ω"), lambda * bd + d - lambda - omega, 0.0, 1e-12);
        let rho = sol.rho;
        let e = sol.exceptional_first_service().unwrap();
        let (mut worst_product, mut worst_efs, mut worst_hat) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let s = Complex64::new(rng.random_range(1e-3..=10.0), rng.random_range(-10.0..=10.0));
            let b = beta(s);
            let mg1 = (1.0 - rho) * lambda * (1.0 - b) / (s - lambda * (1.0 - b));
            let second = d / omega * (((d - omega) / lambda) * s / (1.0 - b) - d) / (s - d);
            let phi = sol.phi_plus(s);
            worst_product = worst_product.max((phi - mg1 * second).norm());
            let hat = d / (s - d) * (bd - b) / (1.0 - bd);
            worst_hat = worst_hat.max((e.lst(s) - hat).norm());
            let efs = (1.0 - rho) * d / omega * (1.0 - bd) * (1.0 - hat) / (s - lambda * (1.0 - b));
            worst_efs = worst_efs.max((phi - efs).norm());
        }
        r.check(worst_product < 1e-10, format!("{name}: max |φ₊ − product form| = {worst_product:.2e} < 1e-10"));
        r.check(worst_hat < 1e-10, format!("{name}: max |β̂ − overshoot LST| = {worst_hat:.2e} < 1e-10"));
        r.check(worst_efs < 1e-10, format!("{name}: max |φ₊ − exceptional-first-service form| = {worst_efs:.2e} < 1e-10"));
        r.close(&format!("{name}: E B̂"), e.mean, dist.mean() / (1.0 - bd) - 1.0 / d, 1e-12);
    }
    let sol = solve_queue(lambda, omega, &laws[0].1).unwrap();
    let e = sol.exceptional_first_service().unwrap();
    let worst = (0..20)
        .map(|_| Complex64::new(rng.random_range(0.0..=10.0), rng.random_range(-10.0..=10.0)))
        .map(|s| (e.lst(s) - 2.0 / (2.0 + s)).norm())
        .fold(0.0, f64::max);
    r.check(worst < 1e-12, format!("exponential: max |β̂ − β| = {worst:.2e} < 1e-12"));
    r.close("exponential: E B̂ = E B", e.mean, 0.5, 1e-12);
    r.finish();
}

#[test]
fn criterion_04_insurance_exponential() {
    let mut r = Report::new(4, 180.0);
    let (nu, lambda, omega, c) = (2.0, 1.0, 2.0, 1.0);
    let dist = ServiceDistribution::exponential(nu).unwrap();
    let s = solve_insurance(lambda, c, omega, &dist).unwrap();
    let u0 = s.u_plus(0.0).unwrap();
    r.close("u₊(0) ≈ 0.3596118", u0, 0.359_611_8, 1e-7);
    r.close("u₊(0) = ũ₋(0)", u0, s.u_tilde_minus(0.0), 1e-12);
    r.close("u₊(0) + u₋(0)", u0 + s.u_minus(0.0), 1.0, 1e-12);

    let k = nu - lambda / c;
    let classical = |x: f64| 1.0 - lambda / (nu * c) * (-k * x).exp();
    let d = s.delta;
    for x in [0.0, 0.5, 1.0, 2.0] {
        let hat = simpson(|t| d * (-d * t).exp() * classical(x + t), 0.0, 60.0 / d, 20_000);
        r.close(&format!("1 − u₊({x}) = ŝ({x}) by quadrature"), 1.0 - s.u_plus(x).unwrap(), hat, 1e-8);
        r.close(&format!("ŝ({x}) closed form"), s.ai_survival_hat(x).unwrap(), hat, 1e-8);
    }

    let cfg = SimConfig { seed: 41, paths: 1_000_000, ..Default::default() };
    let rate = RateSpec::Constant { omega };
    let e = simulate_bankruptcy(lambda, c, rate, &dist, 0.0, &cfg).unwrap();
    r.check(
        (e.probability - u0).abs() <= 3.0 * e.stderr + e.tail_bias,
        format!("simulated u(0) = {:.5} ± {:.1e} vs {u0:.5}", e.probability, e.stderr),
    );

    // Instant bankruptcy on entering the negative half-line is classical ruin.
    let ruin0 = lambda / (nu * c);
    let big = solve_insurance(lambda, c, 1e4, &dist).unwrap();
    let eb = simulate_bankruptcy(lambda, c, RateSpec::Constant { omega: 1e4 }, &dist, 0.0, &cfg).unwrap();
    r.check(
        eb.ci_low - eb.tail_bias <= ruin0 && ruin0 <= eb.ci_high,
        format!("ω = 10⁴: simulated {:.5} in [{:.5}, {:.5}] ∋ classical ruin {ruin0}", eb.probability, eb.ci_low, eb.ci_high),
    );
    r.close("ω = 10⁴: analytic u₊(0) vs classical ruin", big.u_plus(0.0).unwrap(), ruin0, 1e-3);
    // A vanishing hazard never terminates anyone.
    let small = solve_insurance(lambda, c, 1e-4, &dist).unwrap();
    let es = simulate_bankruptcy(lambda, c, RateSpec::Constant { omega: 1e-4 }, &dist, 0.0, &cfg).unwrap();
    let u_small = small.u_plus(0.0).unwrap();
    r.check(
        es.ci_low - es.tail_bias <= u_small && u_small <= es.ci_high,
        format!("ω = 10⁻⁴: simulated {:.2e} in [{:.2e}, {:.2e}] ∋ analytic {u_small:.2e}", es.probability, es.ci_low, es.ci_high),
    );
    r.check(u_small < 1e-3, format!("ω = 10⁻⁴: analytic u₊(0) = {u_small:.2e} → 0"));
    r.finish();
}

#[test]
fn criterion_05_linear_integer_sigma() {
    let mut r = Report::new(5, 10.0);
    let (lambda, mu, a) = (1.0, 2.0, 1.0);
    let s = appendix_solve(lambda, mu, a).unwrap();
    r.check(s.model.integer && s.model.k == 2, format!("σ = {} integer, K = {}", s.model.sigma, s.model.k));
    let c = &s.c;
    let kk = s.model.k;
    r.close("k=0 recursion", -mu * lambda * c[0] + s.r1 * mu, 0.0, 1e-10);
    r.close("k=1 recursion", (a - mu * lambda) * c[1] + (mu + lambda) * c[0], a * s.ei + s.r1, 1e-10);
    for k in 2..=kk {
        let res = (k as f64 * a - mu * lambda) * c[k] + (mu + lambda) * c[k - 1] - c[k - 2];
        r.close(&format!("k={k} recursion"), res, 0.0, 1e-10);
    }

    // c_{K−1} (μλ/K)^{K/2} e^{−λt−at²/2} He_K(√(K/μλ)(μ+λ) + √(μλ/K) t), He₂(y) = y² − 1
    let q = (mu * lambda / kk as f64).sqrt();
    let explicit = |t: f64| {
        let y = (mu + lambda) / q + q * t;
        c[kk - 1] * q.powi(kk as i32) * (-lambda * t - 0.5 * a * t * t).exp() * (y * y - 1.0)
    };
    let grid: Vec<f64> = (0..=100).map(|i| 0.08 * i as f64).collect();
    let worst = grid.iter().map(|&t| (s.v_minus_integer(t).unwrap() - explicit(t)).abs()).fold(0.0, f64::max);
    r.check(worst < 1e-12, format!("Hermite density vs explicit He₂ form: {worst:.2e}"));
    let positive = grid.iter().all(|&t| s.v_minus_integer(t).unwrap() > 0.0);
    r.check(positive, "Hermite density positive on [0, 8]");
    let mass = simpson(|t| s.v_minus_integer(t).unwrap(), 0.0, 14.0, 20_000);
    r.close("∫v₋ = 1 − r₁/(μ−λ)", mass, 1.0 - s.r1 / (mu - lambda), 1e-8);

    let d = direct_solve(lambda, mu, a).unwrap();
    r.check(d.route == DirectRoute::HermiteEven, format!("direct route {}", d.route.name()));
    let weight = |t: f64| (-lambda * t - 0.5 * a * t * t).exp();
    let ratios: Vec<f64> = grid[..51].iter().map(|&t| s.v_minus_integer(t).unwrap() / (weight(t) * d.theta(t).unwrap())).collect();
    let spread = ratios.iter().map(|q| (q / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    r.check(spread < 1e-8, format!("appendix / even-Hermite form: relative spread {spread:.2e} < 1e-8"));
    r.finish();
}

/// `∫_0^U v^p e^{E(v)} dv` by `v = t²`, which removes the endpoint singularity
/// for `p ∈ {−½, 0, ½}`.
fn weighted_integral(p: f64, upper: f64, e: impl Fn(f64) -> f64) -> f64 {
    simpson(|t: f64| 2.0 * t.powf(2.0 * p + 1.0) * e(t * t).exp(), 0.0, upper.sqrt(), 40_000)
}

fn linear_closed_form_case(r: &mut Report, sigma_label: &str, a: f64) {
    let (lambda, mu) = (1.0, 2.0);
    let s = appendix_solve(lambda, mu, a).unwrap();
    let sigma = s.model.sigma;
    let a1 = |v: f64| ((mu + lambda) * v - 0.5 * v * v) / a;
    let a2 = |v: f64| -((mu + lambda) * v + 0.5 * v * v) / a;
    let i = |p: f64| weighted_integral(p, 60.0, a2);
    let jt = |p: f64| weighted_integral(p, mu, |v| a1(v) - a1(mu));
    let (c1, c0, ei) = if s.model.integer {
        let d = mu * a / (mu - lambda) + mu * (jt(0.0) + (-a1(mu)).exp() * i(0.0));
        (i(0.0) / d, a / d, 1.0 / (a / (mu - lambda) + jt(0.0) + (-a1(mu)).exp() * i(0.0)))
    } else {
        let (ilo, ihi) = (i(-sigma), i(1.0 - sigma));
        let d = mu * a / (mu - lambda) * ilo + mu.powf(sigma) * (jt(1.0 - sigma) * ilo + ihi * jt(-sigma));
        (ihi / (1.0 - sigma) / d, a * ilo / d, (mu * ilo + ihi) / d)
    };
    r.close(&format!("{sigma_label}: c₁"), s.c[1], c1, 1e-10);
    r.close(&format!("{sigma_label}: c₀"), s.c[0], c0, 1e-10);
    r.close(&format!("{sigma_label}: r₁ = λc₀"), s.r1, lambda * c0, 1e-10);
    r.close(&format!("{sigma_label}: E I"), s.ei, ei, 1e-10);

    let d = direct_solve(lambda, mu, a).unwrap();
    r.close(&format!("{sigma_label}: r₁ = λC"), s.r1, lambda * d.c_const, 1e-6);
    let xi = |x: f64| (a * x + lambda + mu).powi(2) / (2.0 * a);
    let cfg = s.default_inversion_config();
    r.check(cfg.gamma > mu, format!("{sigma_label}: abscissa γ = {} > μ", cfg.gamma));
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for k in 0..=39 {
        let x = 0.1 + 0.1 * k as f64;
        let inv = s.v_minus_inversion(x, &cfg).unwrap();
        worst = worst.max((inv.value - d.v_minus(x).unwrap()).abs());
        ratios.push(d.theta(x).unwrap() / kummer_u(-0.5 * sigma, 0.5, xi(x)).unwrap());
    }
    r.check(worst < 1e-4, format!("{sigma_label}: Bromwich φ₋ vs Kummer density on [0.1, 4]: {worst:.2e} < 1e-4"));
    let spread = ratios.iter().map(|q| (q / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    r.check(spread < 1e-10, format!("{sigma_label}: direct θ ∝ U(−σ/2, ½, ξ): spread {spread:.2e}"));
}

#[test]
fn criterion_06_linear_sigma_one_and_half() {
    let mut r = Report::new(6, 60.0);
    linear_closed_form_case(&mut r, "σ=1", 2.0);
    linear_closed_form_case(&mut r, "σ=0.5", 4.0);
    r.finish();
}

#[test]
fn criterion_07_linear_vs_simulation() {
    let mut r = Report::new(7, 180.0);
    let (lambda, mu, a) = (1.0, 2.0, 1.0);
    let s = appendix_solve(lambda, mu, a).unwrap();
    let dist = ServiceDistribution::exponential(mu).unwrap();
    let est = simulate_workload(lambda, &dist, RateSpec::Linear { a }, &long_run(71)).unwrap();
    let vm = |x: f64| s.v_minus(x).unwrap();
    let l1 = est.inventory.l1_distance(&vm, s.phi_minus(0.0).unwrap());
    r.check(l1 < 0.03, format!("L1(v₋) = {l1:.5} < 0.03"));
    let z = est.mean_inventory.z_score(s.ei);
    r.check(
        z.abs() <= 3.0,
        format!("Ê I = {:.5} ± {:.1e} vs {:.5} (z = {z:.2})", est.mean_inventory.mean, est.mean_inventory.stderr, s.ei),
    );
    r.finish();
}

#[test]
fn criterion_08_equation_residuals() {
    let mut r = Report::new(8, 60.0);
    let lambda = 1.0;
    let xs = [0.25, 0.5, 1.0, 2.0, 3.0];
    for (name, dist) in [
        ("exponential(2)", ServiceDistribution::exponential(2.0).unwrap()),
        ("erlang(2,4)", ServiceDistribution::erlang(2, 4.0).unwrap()),
    ] {
        let s = solve_queue(lambda, 2.0, &dist).unwrap();
        let vm = |x: f64| s.v_minus(x);
        let vp = |x: f64| s.v_plus(x).unwrap();
        let om = |_: f64| 2.0;
        let (mut w, mut i) = (0.0f64, 0.0f64);
        for x in xs {
            w = w.max(residual::queue_workload_residual(lambda, &dist, &vp, &vm, x).unwrap().abs());
            i = i.max(residual::queue_inventory_residual(lambda, &dist, &om, &vm, x).unwrap().abs());
        }
        r.check(w < 1e-5, format!("{name}, ω = 2: workload level crossing {w:.2e} < 1e-5"));
        r.check(i < 1e-5, format!("{name}, ω = 2: inventory level crossing {i:.2e} < 1e-5"));
    }

    let exp = ServiceDistribution::exponential(2.0).unwrap();
    for a in [1.0, 4.0] {
        let s = appendix_solve(lambda, 2.0, a).unwrap();
        let vm = |x: f64| s.v_minus(x).unwrap();
        let vp = |x: f64| s.v_plus(x);
        let om = |x: f64| a * x;
        let (mut w, mut i) = (0.0f64, 0.0f64);
        for x in xs {
            w = w.max(residual::queue_workload_residual(lambda, &exp, &vp, &vm, x).unwrap().abs());
            i = i.max(residual::queue_inventory_residual(lambda, &exp, &om, &vm, x).unwrap().abs());
        }
        let sigma = s.model.sigma;
        r.check(w < 1e-5, format!("linear σ = {sigma}: workload level crossing {w:.2e} < 1e-5"));
        r.check(i < 1e-5, format!("linear σ = {sigma}: inventory level crossing {i:.2e} < 1e-5"));

        // a(μ−z)φ′ + z(z+λ−μ)φ + aE I(μ−z) − r₁z = 0
        let mu = 2.0;
        let phi = |z: f64| s.phi_minus(z).unwrap();
        let h = 1e-4;
        let mut ode = 0.0f64;
        for z in [0.5, 1.0, 1.5, 3.0, 5.0] {
            let dphi = (phi(z + h) - phi(z - h)) / (2.0 * h);
            let res = a * (mu - z) * dphi + z * (z + lambda - mu) * phi(z) + a * s.ei * (mu - z) - s.r1 * z;
            ode = ode.max(res.abs());
        }
        r.check(ode < 1e-6, format!("linear σ = {sigma}: transform ODE residual {ode:.2e} < 1e-6"));
    }

    let s = solve_insurance(lambda, 1.0, 2.0, &exp).unwrap();
    let up = |x: f64| s.u_plus(x).unwrap();
    let ut = |x: f64| s.u_tilde_minus(x);
    let om = |_: f64| 2.0;
    let (mut p, mut n) = (0.0f64, 0.0f64);
    for x in xs {
        p = p.max(residual::insurance_positive_residual(lambda, 1.0, &exp, &up, &ut, x, 1e-4).unwrap().abs());
        n = n.max(residual::insurance_negative_residual(lambda, 1.0, &exp, &om, &ut, x, 1e-4).unwrap().abs());
    }
    r.check(p < 1e-5, format!("insurance: positive-surplus equation {p:.2e} < 1e-5"));
    r.check(n < 1e-5, format!("insurance: negative-surplus equation {n:.2e} < 1e-5"));
    r.finish();
}

#[test]
fn criterion_09_numerics_kernel() {
    let mut r = Report::new(9, 30.0);

    // He_n(x) = n! Σ_m (−1)^m x^{n−2m} / (m! (n−2m)! 2^m)
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let mut worst = 0.0f64;
    for x in [-2.5, -0.7, 0.0, 0.4, 1.3, 3.0] {
        let all = hermite_prob_all(10, x);
        for (n, &h) in all.iter().enumerate() {
            let want: f64 = (0..=n / 2)
                .map(|m| {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    sign * x.powi((n - 2 * m) as i32) / (fact(m) * fact(n - 2 * m) * 2f64.powi(m as i32))
                })
                .sum::<f64>()
                * fact(n);
            worst = worst.max((h - want).abs() / want.abs().max(1.0));
        }
    }
    r.check(worst < 1e-9, format!("He_n explicit sum, n ≤ 10: {worst:.2e}"));
    let mut gf = 0.0f64;
    for x in [-1.0, 0.3, 2.0] {
        for z in [-0.7, 0.5] {
            let all = hermite_prob_all(60, x);
            let series: f64 = all.iter().enumerate().map(|(n, h)| h * f64::powi(z, n as i32) / fact(n)).sum();
            gf = gf.max((series - (x * z - 0.5 * z * z).exp()).abs());
        }
    }
    r.check(gf < 1e-9, format!("Σ He_n z^n/n! = e^(xz−z²/2): {gf:.2e}"));

    let mut conn = 0.0f64;
    for a in [-1.3, -0.75, -0.25, 0.4] {
        for k in 1..=20 {
            let z = 0.2 * k as f64;
            let u1 = kummer_u_connection(a, 0.5, z).unwrap();
            let u2 = kummer_u_integral(a, 0.5, z).unwrap();
            conn = conn.max((u1 - u2).abs() / u2.abs().max(1.0));
        }
    }
    r.check(conn < 1e-8, format!("U connection formula vs integral representation: {conn:.2e} < 1e-8"));

    let cfg = BromwichConfig::with_gamma(1.0);
    let pairs: Vec<(Box<dyn Fn(Complex64) -> Complex64>, Box<dyn Fn(f64) -> f64>)> = vec![
        (Box::new(|z| 1.0 / (z + 1.0)), Box::new(|x: f64| (-x).exp())),
        (Box::new(|z| 1.0 / ((z + 2.0) * (z + 2.0))), Box::new(|x: f64| x * (-2.0 * x).exp())),
        (Box::new(|z| 1.0 / (z * z + 1.0)), Box::new(f64::sin)),
        (Box::new(|z: Complex64| 1.0 / (z + 1.0).sqrt()), Box::new(|x: f64| (-x).exp() / (std::f64::consts::PI * x).sqrt())),
    ];
    let mut brom = 0.0f64;
    for (tf, f) in &pairs {
        for k in 0..50 {
            let x = 0.1 + 0.1 * k as f64;
            brom = brom.max((bromwich_invert(tf, &cfg, x).unwrap().value - f(x)).abs());
        }
    }
    r.check(brom < 1e-6, format!("Bromwich benchmark pairs on [0.1, 5]: {brom:.2e} < 1e-6"));

    let specs = [
        SingularWeightIntegral::new(-0.5, 3.0, 0.5, None, WeightSign::Decaying),
        SingularWeightIntegral::new(-0.9, 0.75, 0.125, None, WeightSign::Decaying),
        SingularWeightIntegral::new(-0.5, 1.5, 0.25, Some(2.0), WeightSign::Growing).shifted(2.0),
        SingularWeightIntegral::new(0.5, 3.0, 0.5, Some(2.0), WeightSign::Growing),
    ];
    let mut halving = 0.0f64;
    for spec in &specs {
        let base = QuadConfig::default().with_tol(1e-300, 1e-13);
        for n in [4, 8, 16] {
            let coarse = singular_integral_with(spec, &base.with_panels(n)).unwrap();
            let fine = singular_integral_with(spec, &base.with_panels(2 * n)).unwrap();
            halving = halving.max((coarse - fine).abs() / fine.abs().max(1.0));
        }
    }
    r.check(halving < 1e-9, format!("singular integrals under step halving: {halving:.2e} < 1e-9"));
    r.finish();
}

fn run_cli(args: &[&str], threads: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_whkernel"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("WHKERNEL_THREADS", t);
    }
    cmd.output().expect("run whkernel")
}

#[test]
fn criterion_10_determinism() {
    let mut r = Report::new(10, 60.0);
    let dir = tempfile::tempdir().unwrap();
    let commands: [(&str, Vec<&str>); 2] = [
        (
            "simulate-queue",
            vec!["simulate-queue", "--lambda", "1", "--dist", r#"{"type":"erlang","k":2,"mu":4}"#, "--omega", "2", "--time", "5000", "--replications", "8"],
        ),
        ("simulate-ins", vec!["simulate-ins", "--lambda", "1", "--mu", "2", "--omega", "2", "--c", "1", "--x-min", "-1", "--x-max", "1", "--step", "0.5", "--paths", "20000"]),
    ];
    for (name, base) in &commands {
        let mut outputs = Vec::new();
        for (run, seed, threads) in [(0, "5", None), (1, "5", None), (2, "5", Some("1")), (3, "6", None)] {
            let path = dir.path().join(format!("{name}-{run}.csv"));
            let path_s = path.to_str().unwrap().to_string();
            let mut args: Vec<&str> = base.clone();
            args.extend(["--seed", seed, "--csv", &path_s]);
            let out = run_cli(&args, threads);
            r.check(out.status.success(), format!("{name} run {run} exits 0 ({})", String::from_utf8_lossy(&out.stderr).trim()));
            outputs.push(std::fs::read(&path).unwrap_or_default());
        }
        r.check(!outputs[0].is_empty(), format!("{name}: CSV written ({} bytes)", outputs[0].len()));
        r.check(outputs[0] == outputs[1], format!("{name}: same seed, byte-identical CSV"));
        r.check(outputs[0] == outputs[2], format!("{name}: same seed on one thread, byte-identical CSV"));
        r.check(outputs[0] != outputs[3], format!("{name}: different seed changes the CSV"));
    }
    r.finish();
}
