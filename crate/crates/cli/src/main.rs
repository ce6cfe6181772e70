//! `vtheat`: temperatures from ray-supported measures.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

mod commands;
mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<vtheat_core::Error> for CliError {
    fn from(e: vtheat_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "vtheat",
    version,
    about = "Temperatures generated by measures on a ray"
)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (falls back to VTHEAT_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output file; overrides `output.path`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate u(x, t) at one point.
    Eval {
        #[arg(long)]
        r: f64,
        /// Polar angle of x, radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        t: f64,
    },
    /// Evaluate the Weber function D_nu(z).
    Weber {
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        /// integral, series or auto.
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Radial sweep of quadrature against the regime formula.
    Sweep,
    /// Sweep (or read a sweep CSV) and fit ln u = c + p ln r + q r^2.
    Audit {
        /// Existing sweep CSV to audit instead of running a sweep.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Recover disk masses from small-time limits and fit a power law.
    Recover,
    /// Run the invariant suites.
    Selftest {
        #[arg(long, hide = true)]
        inject: Option<String>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", p.display()))
            })?;
            Ok(RunConfig::parse(&text)?)
        }
    }
}

fn configure_jobs(flag: Option<usize>) -> Result<(), CliError> {
    let jobs = match flag {
        Some(n) => Some(n),
        None => match std::env::var("VTHEAT_JOBS") {
            Ok(v) if !v.trim().is_empty() => Some(v.trim().parse().map_err(|_| {
                CliError::Validation(format!("VTHEAT_JOBS must be a positive integer, got `{v}`"))
            })?),
            _ => None,
        },
    };
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot configure workers: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_jobs(cli.jobs)?;
    let mut cfg = load_config(cli.config.as_ref())?;
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.display().to_string());
    }
    if cli.dump_config {
        return output::emit(&cfg, &cfg.dump());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Validation(
            "no subcommand given; see `vtheat --help`".into(),
        ));
    };
    match command {
        Command::Eval { r, theta, t } => commands::eval(&cfg, r, theta, t),
        Command::Weber { nu, z, method } => commands::weber(nu, z, &method),
        Command::Sweep => commands::sweep(&cfg),
        Command::Audit { input } => commands::audit(&cfg, input.as_deref()),
        Command::Recover => commands::recover(&cfg),
        Command::Selftest { inject } => selftest::run(inject.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vtheat: {e}");
            ExitCode::from(e.code())
        }
    }
}
