//! The `lerayflux` command line: configuration, orchestration and reports.
//!
//! Exit codes: 0 success, 2 configuration, 3 CFL violation, 4 I/O or
//! snapshot format, 5 shape or dimension mismatch, 6 insufficient resolution.

pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::Error;
use commands::Context;
use config::ConfigError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CFL: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_SHAPE: i32 = 5;
pub const EXIT_RESOLUTION: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "lerayflux", version, about = "Leray-alpha reactive flow simulator and energy diagnostics")]
pub struct Cli {
    /// TOML run configuration; every section is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.out_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent diagnostics.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Override a configuration value, e.g. `--set model.alpha=0.1`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model and write the energy series and snapshots.
    Simulate,
    /// Spectral energy flux across the configured cutoffs.
    Flux { snapshot: PathBuf },
    /// Dissipation defects over the configured mollification ladder.
    Defect { snapshot: PathBuf },
    /// Littlewood-Paley block norms, Besov norm and structure-function fit.
    Besov { snapshot: PathBuf },
    /// Direction-averaged increment integrals.
    Increments { snapshot: PathBuf },
    /// Shock dissipation and regularity of the 1D sawtooth.
    Burgers,
    /// Repeat the simulation over a ladder of filter lengths.
    SweepAlpha,
    /// Local energy balance residual over a dt × ε refinement table.
    Balance,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Flux { .. } => "flux",
            Command::Defect { .. } => "defect",
            Command::Besov { .. } => "besov",
            Command::Increments { .. } => "increments",
            Command::Burgers => "burgers",
            Command::SweepAlpha => "sweep-alpha",
            Command::Balance => "balance",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Run(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Run(e) => exit_code(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e}"),
            Failure::Run(e) => write!(f, "{e}"),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } => EXIT_CONFIG,
        Error::Cfl { .. } => EXIT_CFL,
        Error::Io(_) | Error::Format(_) => EXIT_IO,
        Error::InvalidGrid(_)
        | Error::NonFinite { .. }
        | Error::ComponentMismatch { .. }
        | Error::GridMismatch(_)
        | Error::Degenerate(_) => EXIT_SHAPE,
        Error::Resolution(_) => EXIT_RESOLUTION,
    }
}

pub fn execute(cli: &Cli) -> Result<manifest::Manifest, Failure> {
    let loaded = config::load(cli.config.as_deref(), &cli.overrides).map_err(Failure::Config)?;
    if let Some(jobs) = cli.jobs {
        // A pool installed earlier in the process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let out_dir = cli.out.clone().unwrap_or_else(|| loaded.config.output.out_dir.clone());
    let ctx = Context { loaded: &loaded, out_dir };
    let result = match &cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Flux { snapshot } => commands::flux(&ctx, snapshot),
        Command::Defect { snapshot } => commands::defect(&ctx, snapshot),
        Command::Besov { snapshot } => commands::besov(&ctx, snapshot),
        Command::Increments { snapshot } => commands::increments(&ctx, snapshot),
        Command::Burgers => commands::burgers(&ctx),
        Command::SweepAlpha => commands::sweep_alpha(&ctx),
        Command::Balance => commands::balance(&ctx),
    };
    result.map_err(Failure::Run)
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(_) => EXIT_OK,
        Err(f) => {
            eprintln!("lerayflux {}: {f}", cli.command.name());
            f.exit_code()
        }
    }
}
