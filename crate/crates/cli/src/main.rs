use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lindyn_cli::commands;
use lindyn_cli::config::{ConfigError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lindyn", version, about = "Criterion sweeps, orbits, porosity scenes and adjoint runs for weighted composition operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named operator, overriding the config's.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory for full reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use the inverse operator S instead of T.
    #[arg(long, global = true)]
    inverse: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every criterion that applies to the configured space.
    Classify,
    /// Orbit norms of a bump, as CSV.
    Orbit,
    /// Porosity constructions and probes.
    Porosity,
    /// Adjoint criteria on atomic measures.
    Adjoint,
    /// Check the example registry; ids default to all.
    Examples { ids: Vec<String> },
}

const USAGE: u8 = 2;

fn threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("LINDYN_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("LINDYN_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("LINDYN_THREADS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn load(cli: &Cli) -> Result<lindyn_cli::config::Experiment, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.resolve(cli.preset.as_deref(), cli.inverse)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Examples { ids } => match commands::resolve_ids(ids) {
            Ok(ids) => commands::examples(&ids, cli.out.as_deref(), &mut out),
            Err(id) => {
                eprintln!("error: unknown example id {id:?}");
                return ExitCode::from(USAGE);
            }
        },
        command => {
            let exp = match load(&cli) {
                Ok(exp) => exp,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            match command {
                Command::Classify => commands::classify(&exp, &mut out),
                Command::Orbit => commands::orbit(&exp, &mut out),
                Command::Porosity => commands::porosity(&exp, &mut out),
                Command::Adjoint => commands::adjoint(&exp, &mut out),
                Command::Examples { .. } => unreachable!(),
            }
        }
    };
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
