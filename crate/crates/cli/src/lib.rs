//! Command-line front end: BER sweeps, spectral/energy efficiency search,
//! analytic tables, PAPR CCDFs and the oracle validation suite.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;
pub mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
pub use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "lcss", version, about = "Layered chirp spread spectrum simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BER versus E_b/N_0 for a grid of schemes and detectors.
    BerSweep(CommonArgs),
    /// Spectral efficiency against the E_b/N_0 needed for a target BER.
    SeEe(CommonArgs),
    /// Spectral efficiency, complexity, interference and theory tables.
    Analyze(CommonArgs),
    /// PAPR complementary CDF.
    Papr(CommonArgs),
    /// Closed forms against direct evaluation; exits 3 on any breach.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads, overriding the config; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::BerSweep(a) | Command::SeEe(a) | Command::Analyze(a) | Command::Papr(a) | Command::Validate(a) => a,
        }
    }
}

/// Run one subcommand and write its table.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let args = cli.command.args();
    let config = RunConfig::load(&args.config)?;
    let workers = args.workers.unwrap_or(config.workers);
    let pool = rayon_pool(workers)?;
    let (table, breach) = pool.install(|| -> Result<_, CliError> {
        Ok(match &cli.command {
            Command::BerSweep(_) => (commands::ber_sweep(&config, workers)?, false),
            Command::SeEe(_) => (commands::se_ee(&config, workers)?, false),
            Command::Analyze(_) => (commands::analyze(&config)?, false),
            Command::Papr(_) => (commands::papr(&config)?, false),
            Command::Validate(_) => {
                let (t, ok) = commands::validate(&config)?;
                (t, !ok)
            }
        })
    })?;
    write(&table, args)?;
    if breach {
        return Err(CliError::Validation("one or more residuals exceed tolerance".into()));
    }
    Ok(())
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))
}

fn write(table: &Table, args: &CommonArgs) -> Result<(), CliError> {
    let body = table.render(args.format)?;
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
