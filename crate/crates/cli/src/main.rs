//! `stpx`: steady states and density profiles of generalized exclusion
//! processes, via logical-network structure matrices, with a seeded Monte
//! Carlo cross-check.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    Input(String),
    /// The solver failed numerically (exit code 3).
    Numerical(String),
    /// Filesystem or serialization trouble (exit code 1).
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<stpx_core::Error> for CliError {
    fn from(e: stpx_core::Error) -> Self {
        match e {
            stpx_core::Error::NonConvergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "stpx",
    about = "Steady states of generalized exclusion processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the transition matrix, solve for the stationary
    /// distribution and write the requested tables.
    Solve {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config; default ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solver override: power or direct.
        #[arg(long)]
        method: Option<String>,
        /// Convergence tolerance override.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the Monte Carlo oracle and compare with the solver.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// Seed override for the simulation.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dump per-transition structure matrices and the assembled chain.
    Matrices {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump a single transition by name.
        #[arg(long, conflicts_with = "all")]
        transition: Option<String>,
        /// Dump every transition.
        #[arg(long)]
        all: bool,
    },
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn thread_cap() -> usize {
    match std::env::var("STPX_THREADS") {
        Ok(v) => v.parse().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

fn resolve_out(cfg: &mut RunConfig, out: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = out {
        cfg.output.directory = dir.display().to_string();
    }
    PathBuf::from(&cfg.output.directory)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, out, method, tol } => {
            let mut cfg = load_config(&config)?;
            if let Some(m) = method {
                cfg.solver.method = m;
            }
            if let Some(t) = tol {
                cfg.solver.tol = t;
            }
            let out_dir = resolve_out(&mut cfg, out);
            commands::cmd_solve(&cfg, &out_dir)
        }
        Command::Simulate { config, out, method, tol, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(m) = method {
                cfg.solver.method = m;
            }
            if let Some(t) = tol {
                cfg.solver.tol = t;
            }
            if let Some(s) = seed {
                match cfg.simulate.as_mut() {
                    Some(sim) => sim.seed = s,
                    None => {
                        return Err(CliError::Input(
                            "config has no `simulate` section to seed".into(),
                        ))
                    }
                }
            }
            let out_dir = resolve_out(&mut cfg, out);
            commands::cmd_simulate(&cfg, &out_dir, thread_cap())
        }
        Command::Matrices { config, out, transition, all } => {
            let mut cfg = load_config(&config)?;
            let out_dir = resolve_out(&mut cfg, out);
            commands::cmd_matrices(&cfg, &out_dir, transition.as_deref(), all)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stpx: {e}");
            e.exit_code()
        }
    }
}
