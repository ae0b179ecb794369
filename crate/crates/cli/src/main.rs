mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;
use whkernel::dist::DistError;
use whkernel::SolveError;

use config::{CommandKind, RunConfig};

/// Workload/inventory densities and bankruptcy probabilities for queues with
/// inventory clearing and surplus models with a bankruptcy rate.
#[derive(Parser)]
#[command(name = "whkernel", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Constant clearing rate, general service law: summary and v₋/v₊ table.
    SolveQueueConst(RunConfig),
    /// Constant bankruptcy rate: summary and bankruptcy probability by surplus.
    SolveInsConst(RunConfig),
    /// Linear clearing rate a·x, exponential service.
    SolveLinear(RunConfig),
    /// Simulate the workload/inventory process; histogram table.
    SimulateQueue(RunConfig),
    /// Simulate surplus paths; bankruptcy probability estimates.
    SimulateIns(RunConfig),
    /// Simulate a queue model and compare with its analytic densities.
    Compare(RunConfig),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidParameter(_)
            | SolveError::Unstable { .. }
            | SolveError::UnsupportedDistribution(_)
            | SolveError::WrongRegime(_) => CliError::Config(e.to_string()),
            SolveError::Dist(d) => d.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::PoleProximity { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WHKERNEL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WHKERNEL_THREADS must be a positive integer, got '{v}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (kind, flags) = match cli.command {
        Cmd::SolveQueueConst(c) => (CommandKind::SolveQueueConst, c),
        Cmd::SolveInsConst(c) => (CommandKind::SolveInsConst, c),
        Cmd::SolveLinear(c) => (CommandKind::SolveLinear, c),
        Cmd::SimulateQueue(c) => (CommandKind::SimulateQueue, c),
        Cmd::SimulateIns(c) => (CommandKind::SimulateIns, c),
        Cmd::Compare(c) => (CommandKind::Compare, c),
    };
    let cfg = flags.resolve(kind)?;
    if cfg.dump_config {
        println!("{}", cfg.to_json()?);
        return Ok(true);
    }
    let outcome = commands::run(&cfg)?;
    if let Some(text) = outcome.stdout {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    }
    Ok(!outcome.verdict_failed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{{\"error\":\"verdict\",\"message\":\"comparison failed its L1 bound\"}}");
            ExitCode::from(4)
        }
        Err(e) => {
            let msg = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
