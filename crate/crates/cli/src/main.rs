mod commands;
mod config;
mod error;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::Out;

#[derive(Parser, Debug)]
#[command(version, about = "Resonance fluorescence near a photonic band edge")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Defaults to json for order-check, csv otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "PBG_FLUOR_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Dump G, Gc and N over a frequency grid.
    Kernel,
    /// Incoherent spectrum with peak table and powers.
    Spectrum,
    /// Offset scan of the transition frequency above the edge.
    Scan,
    /// Compare zero- and first-order spectra.
    OrderCheck,
    /// Run the oracle suite and write a pass/fail report.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Spectrum => "spectrum",
            Command::Scan => "scan",
            Command::OrderCheck => "order-check",
            Command::Validate => "validate",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    let format = cli.format.or(cfg.format).unwrap_or(match cli.command {
        Command::OrderCheck | Command::Validate => Format::Json,
        _ => Format::Csv,
    });
    let dir = cli.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let mut out = Out::new(&dir)?;
    match cli.command {
        Command::Kernel => commands::kernel(&cfg, format, &mut out),
        Command::Spectrum => commands::spectrum(&cfg, format, &mut out),
        Command::Scan => commands::scan(&cfg, format, &mut out),
        Command::OrderCheck => commands::order_check(&cfg, format, &mut out),
        Command::Validate => {
            let report = validate::suite(&cfg.params)?;
            out.json("validate.json", cli.command.name(), &cfg, &report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                Err(CliError::Validation(format!("failed checks: {}", failed.join(", "))))
            }
        }
    }?;
    for p in &out.written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            e.exit_code()
        }
    }
}
