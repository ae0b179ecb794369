//! Run configuration. The same struct is the clap flag set and the JSON
//! schema, so every flag `--foo-bar` corresponds to the JSON key `foo_bar`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use whkernel::dist::DistSpec;
use whkernel::simulate::{RateSpec, SimConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    SolveQueueConst,
    SolveInsConst,
    SolveLinear,
    SimulateQueue,
    SimulateIns,
    Compare,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::SolveQueueConst => "solve-queue-const",
            CommandKind::SolveInsConst => "solve-ins-const",
            CommandKind::SolveLinear => "solve-linear",
            CommandKind::SimulateQueue => "simulate-queue",
            CommandKind::SimulateIns => "simulate-ins",
            CommandKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LinearRoute {
    Appendix,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CompareModel {
    QueueConst,
    Linear,
}

fn parse_dist(s: &str) -> Result<DistSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid distribution JSON: {e}"))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Read the run configuration from a JSON file; its values win over flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    #[serde(skip)]
    pub dump_config: bool,

    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,

    /// Arrival (claim) rate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Exponential service rate; shorthand for `--dist '{"type":"exponential","mu":..}'`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Service / claim law as JSON, e.g. '{"type":"erlang","k":2,"mu":4}'.
    #[arg(long, value_parser = parse_dist)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistSpec>,
    /// Constant clearing / bankruptcy rate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Slope of a linear clearing / bankruptcy rate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Premium rate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Initial surplus for simulate-ins (any sign).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<LinearRoute>,
    /// Model used by `compare`.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CompareModel>,

    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    /// Simulated time per replication, burn-in included.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max_neg: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max_pos: Option<f64>,
    /// Total surplus paths for simulate-ins.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    /// Survival threshold M for simulate-ins.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,

    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Where `compare` writes its verdict (stdout otherwise).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<PathBuf>,
    /// L1 bound for the `compare` verdict.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_l1: Option<f64>,
}

/// Grid of evaluation points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.x_max - self.x_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.x_min + k as f64 * self.step).collect()
    }
}

fn config_err(m: impl Into<String>) -> CliError {
    CliError::Config(m.into())
}

impl RunConfig {
    /// Overlay a JSON config file on top of the flags; the file wins and each
    /// overridden flag is reported on stderr.
    pub fn resolve(self, command: CommandKind) -> Result<RunConfig, CliError> {
        let dump = self.dump_config;
        let mut merged = match &self.config {
            None => self,
            Some(path) => merge_file(self.clone(), path)?,
        };
        if let Some(c) = merged.command {
            if c != command {
                return Err(config_err(format!(
                    "config file is for '{}' but the command is '{}'",
                    c.name(),
                    command.name()
                )));
            }
        }
        merged.command = Some(command);
        merged.dump_config = dump;
        merged.config = None;
        Ok(merged)
    }

    pub fn require(&self, name: &str, v: Option<f64>) -> Result<f64, CliError> {
        v.ok_or_else(|| config_err(format!("--{} is required for {}", name.replace('_', "-"), self.cmd())))
    }

    fn cmd(&self) -> &'static str {
        self.command.map(|c| c.name()).unwrap_or("this command")
    }

    pub fn forbid(&self, names: &[(&str, bool)]) -> Result<(), CliError> {
        for (name, set) in names {
            if *set {
                return Err(config_err(format!(
                    "--{} does not apply to {}",
                    name.replace('_', "-"),
                    self.cmd()
                )));
            }
        }
        Ok(())
    }

    /// Service / claim law: `dist`, or exponential(`mu`).
    pub fn distribution(&self) -> Result<DistSpec, CliError> {
        match (&self.dist, self.mu) {
            (Some(_), Some(_)) => Err(config_err("give either --dist or --mu, not both")),
            (Some(d), None) => Ok(d.clone()),
            (None, Some(mu)) => Ok(DistSpec::Exponential { mu }),
            (None, None) => Err(config_err(format!("{} needs --dist or --mu", self.cmd()))),
        }
    }

    pub fn rate(&self) -> Result<RateSpec, CliError> {
        match (self.omega, self.a) {
            (Some(omega), None) => Ok(RateSpec::Constant { omega }),
            (None, Some(a)) => Ok(RateSpec::Linear { a }),
            _ => Err(config_err(format!("{} needs exactly one of --omega and --a", self.cmd()))),
        }
    }

    pub fn grid(&self, default: Grid) -> Result<Grid, CliError> {
        let g = Grid {
            x_min: self.x_min.unwrap_or(default.x_min),
            x_max: self.x_max.unwrap_or(default.x_max),
            step: self.step.unwrap_or(default.step),
        };
        if !(g.step > 0.0 && g.step.is_finite()) {
            return Err(config_err(format!("grid step must be positive, got {}", g.step)));
        }
        if !(g.x_max >= g.x_min && g.x_min.is_finite() && g.x_max.is_finite()) {
            return Err(config_err(format!("grid range [{}, {}] is empty", g.x_min, g.x_max)));
        }
        if (g.x_max - g.x_min) / g.step > 1e7 {
            return Err(config_err("grid has more than 10^7 points"));
        }
        Ok(g)
    }

    pub fn has_grid(&self) -> bool {
        self.x_min.is_some() || self.x_max.is_some() || self.step.is_some()
    }

    pub fn sim_config(&self) -> SimConfig {
        let d = SimConfig::default();
        SimConfig {
            seed: self.seed.unwrap_or(d.seed),
            replications: self.replications.unwrap_or(d.replications),
            time: self.time.unwrap_or(d.time),
            burn_in: self.burn_in.unwrap_or(d.burn_in),
            bin_width: self.bin_width.unwrap_or(d.bin_width),
            x_max_neg: self.x_max_neg.unwrap_or(d.x_max_neg),
            x_max_pos: self.x_max_pos.unwrap_or(d.x_max_pos),
            paths: self.paths.unwrap_or(d.paths),
            threshold: self.threshold.or(d.threshold),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            exec: d.exec,
        }
    }

    pub fn any_sim_field(&self) -> bool {
        self.seed.is_some()
            || self.replications.is_some()
            || self.time.is_some()
            || self.burn_in.is_some()
            || self.bin_width.is_some()
            || self.x_max_neg.is_some()
            || self.x_max_pos.is_some()
            || self.paths.is_some()
            || self.threshold.is_some()
            || self.tail_tol.is_some()
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| config_err(e.to_string()))
    }
}

fn merge_file(flags: RunConfig, path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let file: Value = serde_json::from_str(&text)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let Value::Object(file) = file else {
        return Err(config_err(format!("{}: expected a JSON object", path.display())));
    };
    // Validate the file on its own before merging, so unknown keys are caught.
    serde_json::from_value::<RunConfig>(Value::Object(file.clone()))
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let Value::Object(mut merged) =
        serde_json::to_value(&flags).map_err(|e| config_err(e.to_string()))?
    else {
        unreachable!("RunConfig serialises to an object");
    };
    for (k, v) in file {
        if let Some(old) = merged.get(&k) {
            if *old != v {
                eprintln!(
                    "warning: --{} {} overridden by {} from {}",
                    k.replace('_', "-"),
                    old,
                    v,
                    path.display()
                );
            }
        }
        merged.insert(k, v);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| config_err(e.to_string()))
}
