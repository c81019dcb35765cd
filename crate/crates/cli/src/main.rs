//! `qflow`: fields, residual suites, trajectories, cross flows and many-body
//! reports for analytic quantum states.
//!
//! Exit codes: 0 when every asserted check passes, 1 when a check fails or a
//! computation errors, 2 on configuration errors.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use commands::{Context, ManybodyArgs, ManybodyReport, TraceArgs};
use config::{parse_grid, parse_point, parse_tolerance, CliError, CliResult, RunConfig, StateArg};
use qflow::crossflow::CrossPolicy;
use qflow::manybody::{FieldRoute, Normalization};
use qflow::trajectories::Mode;
use qflow::verifier::Suite;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qflow", version, about = "Quantum-fluid fields and residual checks for analytic states")]
struct Cli {
    /// JSON run configuration; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// State shorthand (`hydrogen:1s`, `super:1s+2s`, `he:1.6875`, ...) or JSON spec.
    #[arg(long, global = true)]
    state: Option<String>,
    /// `reference`, `verification`, `spherical:r_min:r_max:nr:ntheta:nphi` or JSON.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Comma-separated sample times.
    #[arg(long = "t", global = true, value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Tolerance override `KEY=VALUE`; repeatable.
    #[arg(long, global = true)]
    tol: Vec<String>,
    /// JSON report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for CSV dumps.
    #[arg(long, global = true)]
    csv_dir: Option<PathBuf>,
    /// Worker threads; 1 keeps reductions reproducible across machines.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correspondence fields on a grid.
    Fields,
    /// Residual suites.
    Verify {
        /// continuity, energy, euler, momentum, conservation, bohmian,
        /// orthogonality or all; comma-separated.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
    /// Integrate one trajectory.
    Trace {
        #[arg(long, default_value = "1,0,0")]
        x0: String,
        /// `v`, `w`, `cross` or `cross:<policy>`.
        #[arg(long, default_value = "v")]
        mode: String,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Cross-flow diagnostics.
    Crossflow {
        /// `aux:z`, `aux:x:raw`, `gradS`, `gradS:raw`, `holland`, `holland:down`.
        #[arg(long, default_value = "aux:z")]
        policy: String,
    },
    /// Reduced one-body picture of a determinant.
    Manybody {
        #[arg(long, value_enum)]
        report: ManybodyReport,
        /// `n` or `unity`.
        #[arg(long, default_value = "n")]
        normalization: String,
        /// `auto`, `shell` or `centred`.
        #[arg(long, default_value = "auto")]
        route: String,
    },
    /// Summarize saved JSON reports.
    Report { files: Vec<PathBuf> },
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

/// Config file entries overridden by flags.
fn merged_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.state {
        c.state = Some(StateArg::Shorthand(s.clone()));
    }
    if let Some(g) = &cli.grid {
        c.grid = Some(parse_grid(g)?);
    }
    if !cli.t.is_empty() {
        c.t_samples = cli.t.clone();
    }
    for s in &cli.tol {
        let (k, v) = parse_tolerance(s)?;
        c.tolerances.insert(k, v);
    }
    if cli.out.is_some() {
        c.output.json_path = cli.out.clone();
    }
    if cli.csv_dir.is_some() {
        c.output.csv_dir = cli.csv_dir.clone();
    }
    if let Command::Verify { suite } = &cli.command {
        if !suite.is_empty() {
            c.suites = suite.iter().map(|s| s.parse::<Suite>().map_err(CliError::Config)).collect::<CliResult<_>>()?;
        }
    }
    Ok(c)
}

/// Returns whether every asserted check passed.
fn run(cli: Cli) -> CliResult<bool> {
    if cli.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(config_err)?;
    if let Command::Report { files } = &cli.command {
        return commands::summarize(files);
    }
    let config = merged_config(&cli)?;
    let ctx = Context::new(config, cli.threads)?;
    let (report, tables) = match &cli.command {
        Command::Fields => commands::fields(&ctx)?,
        Command::Verify { .. } => commands::verify(&ctx, &ctx.config.suites)?,
        Command::Trace { x0, mode, t_end, dt } => {
            let args = TraceArgs {
                x0: parse_point(x0)?,
                mode: Mode::parse(mode)?,
                t_end: *t_end,
                dt: *dt,
            };
            commands::trace(&ctx, &args)?
        }
        Command::Crossflow { policy } => commands::crossflow(&ctx, &CrossPolicy::parse(policy)?)?,
        Command::Manybody {
            report,
            normalization,
            route,
        } => {
            let args = ManybodyArgs {
                report: *report,
                normalization: normalization.parse::<Normalization>()?,
                route: route.parse::<FieldRoute>()?,
            };
            commands::manybody(&ctx, &args)?
        }
        Command::Report { .. } => unreachable!("handled above"),
    };
    if let Some(dir) = &ctx.config.output.csv_dir {
        for t in &tables {
            t.write(dir)?;
        }
    }
    report.emit(ctx.config.output.json_path.as_deref())?;
    let mut failures = report.failures().peekable();
    if let Some(first) = failures.peek().cloned() {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("failed checks: {}", names.join(", "));
        eprintln!("{}", serde_json::to_string(first).map_err(config_err)?);
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Run(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
