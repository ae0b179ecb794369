use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use whkernel::constant_omega::{solve_insurance, solve_queue};
use whkernel::dist::ServiceDistribution;
use whkernel::linear_omega::{appendix_solve, direct_solve};
use whkernel::simulate::{simulate_bankruptcy, simulate_workload, DensityEstimate, RateSpec};

use crate::config::{CommandKind, CompareModel, Grid, LinearRoute, RunConfig};
use crate::CliError;

/// Exit status plus what to print on stdout.
pub struct Outcome {
    pub stdout: Option<String>,
    pub verdict_failed: bool,
}

const X_GRID: Grid = Grid { x_min: 0.0, x_max: 5.0, step: 0.05 };
const SIGNED_GRID: Grid = Grid { x_min: -5.0, x_max: 5.0, step: 0.05 };
const DEFAULT_MAX_L1: f64 = 0.03;

fn num(v: f64) -> Result<String, CliError> {
    if v.is_finite() {
        Ok(format!("{v:.16e}"))
    } else {
        Err(CliError::Numerical(format!("non-finite value {v} in output")))
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect::<Result<_, _>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn check_finite(v: &Value, at: &str) -> Result<(), CliError> {
    match v {
        // serde_json turns NaN and infinities into null.
        Value::Null => Err(CliError::Numerical(format!("non-finite value at {at}"))),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .try_for_each(|(i, x)| check_finite(x, &format!("{at}[{i}]"))),
        Value::Object(m) => m.iter().try_for_each(|(k, x)| check_finite(x, &format!("{at}.{k}"))),
        _ => Ok(()),
    }
}

/// Summary goes to `path` if given, otherwise it is returned for stdout.
fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<Option<String>, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    check_finite(&v, "$")?;
    let text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Numerical(e.to_string()))? + "\n";
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn distribution(cfg: &RunConfig) -> Result<ServiceDistribution, CliError> {
    Ok(ServiceDistribution::try_from(cfg.distribution()?)?)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.expect("resolved config carries its command");
    let plain = |stdout| Outcome { stdout, verdict_failed: false };
    match command {
        CommandKind::SolveQueueConst => solve_queue_const(cfg).map(plain),
        CommandKind::SolveInsConst => solve_ins_const(cfg).map(plain),
        CommandKind::SolveLinear => solve_linear(cfg).map(plain),
        CommandKind::SimulateQueue => simulate_queue(cfg).map(plain),
        CommandKind::SimulateIns => simulate_ins(cfg).map(plain),
        CommandKind::Compare => compare(cfg),
    }
}

fn no_sim_fields(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.any_sim_field() {
        return Err(CliError::Config(format!(
            "simulation settings do not apply to {}",
            cfg.command.map(|c| c.name()).unwrap_or("")
        )));
    }
    cfg.forbid(&[("verdict", cfg.verdict.is_some()), ("max_l1", cfg.max_l1.is_some())])
}

fn solve_queue_const(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    no_sim_fields(cfg)?;
    cfg.forbid(&[
        ("a", cfg.a.is_some()),
        ("c", cfg.c.is_some()),
        ("x0", cfg.x0.is_some()),
        ("route", cfg.route.is_some()),
        ("model", cfg.model.is_some()),
    ])?;
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let omega = cfg.require("omega", cfg.omega)?;
    let dist = distribution(cfg)?;
    let sol = solve_queue(lambda, omega, &dist)?;
    if let Some(path) = &cfg.csv {
        let rows = cfg
            .grid(X_GRID)?
            .points()
            .into_iter()
            .map(|x| Ok(vec![x, sol.v_minus(x), sol.v_plus(x)?]))
            .collect::<Result<Vec<_>, CliError>>()?;
        write_csv(path, &["x", "v_minus", "v_plus"], &rows)?;
    }
    emit_json(&sol.summary(), cfg.summary.as_deref())
}

fn solve_ins_const(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    no_sim_fields(cfg)?;
    cfg.forbid(&[
        ("a", cfg.a.is_some()),
        ("x0", cfg.x0.is_some()),
        ("route", cfg.route.is_some()),
        ("model", cfg.model.is_some()),
    ])?;
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let c = cfg.require("c", cfg.c)?;
    let omega = cfg.require("omega", cfg.omega)?;
    let dist = distribution(cfg)?;
    let sol = solve_insurance(lambda, c, omega, &dist)?;
    if let Some(path) = &cfg.csv {
        // Signed initial surplus → bankruptcy probability.
        let rows = cfg
            .grid(SIGNED_GRID)?
            .points()
            .into_iter()
            .map(|x| Ok(vec![x, sol.bankruptcy_probability(x)?]))
            .collect::<Result<Vec<_>, CliError>>()?;
        write_csv(path, &["x", "value"], &rows)?;
    }
    emit_json(&sol.summary(), cfg.summary.as_deref())
}

fn solve_linear(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    no_sim_fields(cfg)?;
    cfg.forbid(&[
        ("omega", cfg.omega.is_some()),
        ("c", cfg.c.is_some()),
        ("dist", cfg.dist.is_some()),
        ("x0", cfg.x0.is_some()),
        ("model", cfg.model.is_some()),
    ])?;
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let mu = cfg.require("mu", cfg.mu)?;
    let a = cfg.require("a", cfg.a)?;
    let grid = cfg.csv.as_ref().map(|_| cfg.grid(X_GRID)).transpose()?;
    let (summary, rows) = match cfg.route.unwrap_or(LinearRoute::Appendix) {
        LinearRoute::Appendix => {
            let sol = appendix_solve(lambda, mu, a)?;
            let rows = grid
                .map(|g| {
                    g.points()
                        .into_iter()
                        .map(|x| Ok(vec![x, sol.v_minus(x)?, sol.v_plus(x)]))
                        .collect::<Result<Vec<_>, CliError>>()
                })
                .transpose()?;
            (sol.summary(), rows)
        }
        LinearRoute::Direct => {
            let sol = direct_solve(lambda, mu, a)?;
            let rows = grid
                .map(|g| {
                    g.points()
                        .into_iter()
                        .map(|x| Ok(vec![x, sol.v_minus(x)?, sol.v_plus(x)]))
                        .collect::<Result<Vec<_>, CliError>>()
                })
                .transpose()?;
            (sol.summary(), rows)
        }
    };
    if summary.near_integer_warning {
        eprintln!(
            "warning: sigma = {} is within 1e-6 of an integer; the weighted integrals are ill-conditioned",
            summary.sigma
        );
    }
    if let (Some(path), Some(rows)) = (&cfg.csv, rows) {
        write_csv(path, &["x", "v_minus", "v_plus"], &rows)?;
    }
    emit_json(&summary, cfg.summary.as_deref())
}

/// Histogram rows with the inventory on the negative axis, ascending in x.
fn histogram_rows(est: &DensityEstimate) -> Vec<Vec<f64>> {
    let inv = &est.inventory;
    let wl = &est.workload;
    let mut rows = Vec::with_capacity(inv.density.len() + wl.density.len());
    for k in (0..inv.density.len()).rev() {
        let (l, r) = inv.edges(k);
        rows.push(vec![-r, -l, inv.density[k], inv.stderr[k]]);
    }
    for k in 0..wl.density.len() {
        let (l, r) = wl.edges(k);
        rows.push(vec![l, r, wl.density[k], wl.stderr[k]]);
    }
    rows
}

fn workload_summary(lambda: f64, cfg: &RunConfig, rate: RateSpec, est: &DensityEstimate) -> Value {
    json!({
        "lambda": lambda,
        "dist": cfg.distribution().ok(),
        "rate": rate,
        "phi_minus_0": est.phi_minus_0,
        "phi_plus_0": est.phi_plus_0,
        "mean_inventory": est.mean_inventory,
        "clearing_rate": est.clearing_rate,
        "inventory_overflow": est.inventory.overflow,
        "workload_overflow": est.workload.overflow,
        "replications": est.replications,
        "events": est.events,
        "seed": est.seed,
    })
}

fn simulate_queue(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    cfg.forbid(&[
        ("c", cfg.c.is_some()),
        ("x0", cfg.x0.is_some()),
        ("route", cfg.route.is_some()),
        ("model", cfg.model.is_some()),
        ("paths", cfg.paths.is_some()),
        ("threshold", cfg.threshold.is_some()),
        ("tail_tol", cfg.tail_tol.is_some()),
        ("verdict", cfg.verdict.is_some()),
        ("max_l1", cfg.max_l1.is_some()),
    ])?;
    if cfg.has_grid() {
        return Err(CliError::Config("the histogram grid is set by --bin-width, --x-max-neg and --x-max-pos".into()));
    }
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let dist = distribution(cfg)?;
    let rate = cfg.rate()?;
    let est = simulate_workload(lambda, &dist, rate, &cfg.sim_config())?;
    if let Some(path) = &cfg.csv {
        write_csv(path, &["bin_left", "bin_right", "density", "stderr"], &histogram_rows(&est))?;
    }
    emit_json(&workload_summary(lambda, cfg, rate, &est), cfg.summary.as_deref())
}

fn simulate_ins(cfg: &RunConfig) -> Result<Option<String>, CliError> {
    cfg.forbid(&[
        ("route", cfg.route.is_some()),
        ("model", cfg.model.is_some()),
        ("time", cfg.time.is_some()),
        ("burn_in", cfg.burn_in.is_some()),
        ("bin_width", cfg.bin_width.is_some()),
        ("x_max_neg", cfg.x_max_neg.is_some()),
        ("x_max_pos", cfg.x_max_pos.is_some()),
        ("verdict", cfg.verdict.is_some()),
        ("max_l1", cfg.max_l1.is_some()),
    ])?;
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let c = cfg.require("c", cfg.c)?;
    let dist = distribution(cfg)?;
    let rate = cfg.rate()?;
    let starts = match (cfg.x0, cfg.has_grid()) {
        (Some(_), true) => return Err(CliError::Config("give either --x0 or a grid of initial surpluses".into())),
        (Some(x0), false) => vec![x0],
        (None, true) => cfg.grid(SIGNED_GRID)?.points(),
        (None, false) => vec![0.0],
    };
    let sim = cfg.sim_config();
    let estimates = starts
        .iter()
        .map(|&x0| simulate_bankruptcy(lambda, c, rate, &dist, x0, &sim))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = &cfg.csv {
        let rows: Vec<Vec<f64>> = estimates
            .iter()
            .map(|e| vec![e.x0, e.probability, e.stderr, e.ci_low, e.ci_high])
            .collect();
        write_csv(path, &["x0", "probability", "stderr", "ci_low", "ci_high"], &rows)?;
    }
    let summary = json!({
        "lambda": lambda,
        "c": c,
        "dist": cfg.distribution().ok(),
        "rate": rate,
        "estimates": estimates,
    });
    emit_json(&summary, cfg.summary.as_deref())
}

#[derive(Serialize)]
struct Verdict {
    l1_distance: f64,
    max_z_score: f64,
    max_l1: f64,
    pass: bool,
}

fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.forbid(&[
        ("c", cfg.c.is_some()),
        ("x0", cfg.x0.is_some()),
        ("paths", cfg.paths.is_some()),
        ("threshold", cfg.threshold.is_some()),
        ("tail_tol", cfg.tail_tol.is_some()),
    ])?;
    if cfg.has_grid() {
        return Err(CliError::Config("compare uses the histogram bins; grid flags do not apply".into()));
    }
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let max_l1 = cfg.max_l1.unwrap_or(DEFAULT_MAX_L1);
    let sim = cfg.sim_config();
    type Density = Box<dyn Fn(f64) -> f64>;
    // The last element is the inventory mass φ₋(0); the workload carries the rest.
    let (dist, rate, v_minus, v_plus, mass_minus): (ServiceDistribution, RateSpec, Density, Density, f64) =
        match cfg.model.ok_or_else(|| CliError::Config("compare needs --model".into()))? {
            CompareModel::QueueConst => {
                cfg.forbid(&[("a", cfg.a.is_some()), ("route", cfg.route.is_some())])?;
                let omega = cfg.require("omega", cfg.omega)?;
                let dist = distribution(cfg)?;
                let sol = solve_queue(lambda, omega, &dist)?;
                let s2 = sol.clone();
                let mass = sol.phi_minus_0();
                (
                    dist,
                    RateSpec::Constant { omega },
                    Box::new(move |x| sol.v_minus(x)),
                    Box::new(move |x| s2.v_plus(x).unwrap_or(f64::NAN)),
                    mass,
                )
            }
            CompareModel::Linear => {
                cfg.forbid(&[("omega", cfg.omega.is_some()), ("dist", cfg.dist.is_some())])?;
                let mu = cfg.require("mu", cfg.mu)?;
                let a = cfg.require("a", cfg.a)?;
                let dist = ServiceDistribution::exponential(mu)?;
                match cfg.route.unwrap_or(LinearRoute::Appendix) {
                    LinearRoute::Appendix => {
                        let sol = appendix_solve(lambda, mu, a)?;
                        let s2 = sol.clone();
                        let mass = sol.phi_minus(0.0)?;
                        (
                            dist,
                            RateSpec::Linear { a },
                            Box::new(move |x| sol.v_minus(x).unwrap_or(f64::NAN)),
                            Box::new(move |x| s2.v_plus(x)),
                            mass,
                        )
                    }
                    LinearRoute::Direct => {
                        let sol = direct_solve(lambda, mu, a)?;
                        let s2 = sol.clone();
                        let mass = sol.phi_minus_0;
                        (
                            dist,
                            RateSpec::Linear { a },
                            Box::new(move |x| sol.v_minus(x).unwrap_or(f64::NAN)),
                            Box::new(move |x| s2.v_plus(x)),
                            mass,
                        )
                    }
                }
            }
        };
    let est = simulate_workload(lambda, &dist, rate, &sim)?;
    let l1 = est.inventory.l1_distance(&*v_minus, mass_minus) + est.workload.l1_distance(&*v_plus, 1.0 - mass_minus);
    let z = est.inventory.max_z_score(&*v_minus).max(est.workload.max_z_score(&*v_plus));
    if !(l1.is_finite() && z.is_finite()) {
        return Err(CliError::Numerical("analytic density could not be evaluated on the bins".into()));
    }
    if let Some(path) = &cfg.csv {
        let mut rows = Vec::new();
        let (inv, wl) = (&est.inventory, &est.workload);
        for k in (0..inv.density.len()).rev() {
            let (l, r) = inv.edges(k);
            let an = inv.bin_average(k, &*v_minus);
            rows.push(vec![-0.5 * (l + r), an, inv.density[k], inv.stderr[k], (an - inv.density[k]).abs()]);
        }
        for k in 0..wl.density.len() {
            let (l, r) = wl.edges(k);
            let an = wl.bin_average(k, &*v_plus);
            rows.push(vec![0.5 * (l + r), an, wl.density[k], wl.stderr[k], (an - wl.density[k]).abs()]);
        }
        write_csv(path, &["x", "analytic", "simulated", "stderr", "abs_diff"], &rows)?;
    }
    if let Some(path) = &cfg.summary {
        emit_json(&workload_summary(lambda, cfg, rate, &est), Some(path))?;
    }
    let verdict = Verdict { l1_distance: l1, max_z_score: z, max_l1, pass: l1 < max_l1 };
    let stdout = emit_json(&verdict, cfg.verdict.as_deref())?;
    Ok(Outcome { stdout, verdict_failed: !verdict.pass })
}
