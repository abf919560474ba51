//! `dislosim`: runs dislocation scenarios described by TOML files.

mod config;
mod error;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use error::CliError;
use scenarios::{Context, Scenario};

#[derive(Parser, Debug)]
#[command(name = "dislosim", version, about = "Dislocation dynamics in the curve and continuum descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides `io.output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for scenarios that sample random points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Stops after this many time steps.
    #[arg(long, global = true)]
    max_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs the scenario named in the config.
    Run { config: PathBuf },
    /// Checks the config and prints stability and memory estimates.
    Validate { config: PathBuf },
    /// Samples the straight-dislocation field on the config grid.
    FieldSample { config: PathBuf },
    /// Lists the available scenarios.
    List,
}

fn context(cli: &Cli, cfg: &Config) -> Context {
    Context {
        output_dir: cli.output_dir.clone().unwrap_or_else(|| cfg.io.output_dir.clone()),
        seed: cli.seed,
        max_steps: cli.max_steps,
    }
}

fn run_scenario(cli: &Cli, cfg: &Config, sc: &dyn Scenario) -> Result<(), CliError> {
    log::info!("running {}", sc.name());
    let report = sc.run(cfg, &context(cli, cfg))?;
    for l in &report.lines {
        println!("{l}");
    }
    for f in &report.files {
        log::info!("wrote {}", f.display());
    }
    println!("{} file(s) written", report.files.len());
    Ok(())
}

fn human_bytes(n: usize) -> String {
    let n = n as f64;
    if n >= 1024.0 * 1024.0 {
        format!("{:.1} MiB", n / (1024.0 * 1024.0))
    } else {
        format!("{:.1} KiB", n / 1024.0)
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = Config::load(config)?;
            let sc = scenarios::lookup(&cfg.scenario.name).map_err(|e| cfg.err("scenario", "name", e))?;
            run_scenario(cli, &cfg, sc.as_ref())
        }
        Command::FieldSample { config } => {
            let cfg = Config::load(config)?;
            run_scenario(cli, &cfg, scenarios::lookup("field-sample")?.as_ref())
        }
        Command::Validate { config } => {
            let cfg = Config::load(config)?;
            let sc = scenarios::lookup(&cfg.scenario.name).map_err(|e| cfg.err("scenario", "name", e))?;
            let est = sc.validate(&cfg)?;
            println!("ok: {}", sc.name());
            match est.stable_dt {
                Some(dt) if dt.is_finite() => {
                    println!("stable dt <= {dt:.6e}");
                    if let Some(r) = &cfg.run {
                        if r.dt > dt {
                            println!("warning: run.dt = {} exceeds the stable step", r.dt);
                        }
                    }
                }
                Some(_) => println!("stable dt: unbounded (no motion)"),
                None => {}
            }
            println!("memory estimate: {}", human_bytes(est.memory_bytes));
            for n in &est.notes {
                println!("{n}");
            }
            Ok(())
        }
        Command::List => {
            for n in scenarios::registry().names() {
                println!("{n}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
