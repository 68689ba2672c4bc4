use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use curveflow::diagnostics::inequality_suite;
use curveflow_cli::{run, sweep, write_summary_csv, Axis, RunConfig};

#[derive(Parser)]
#[command(
    name = "curveflow",
    version,
    about = "Linear nonlocal curvature flows of convex curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Repeat a run along one parameter axis, e.g. `flow=pan-yang|ma-cheng` or `cos2=0.1,0.2`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the inequality suite on the initial curve only.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

fn base_dir(config: &Path) -> &Path {
    config.parent().unwrap_or(Path::new("."))
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let (traj, written) = run(&cfg, base_dir(&config), &out)?;
            for p in &written {
                eprintln!("wrote {}", p.display());
            }
            println!("{}", traj.outcome);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, axis, out } => {
            let cfg = RunConfig::load(&config)?;
            let axis: Axis = axis.parse()?;
            let spec = cfg.initial_spectrum(base_dir(&config))?;
            let rows = sweep(&spec, &cfg.flow, &cfg.controls, &axis);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join("sweep.csv");
            let mut w = BufWriter::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            );
            write_summary_csv(&rows, &mut w)?;
            w.flush()?;
            write_summary_csv(&rows, io::stdout().lock())?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { config } => {
            let cfg = RunConfig::load(&config)?;
            let spec = cfg.initial_spectrum(base_dir(&config))?;
            let reports = inequality_suite(&spec);
            let mut ok = true;
            for r in &reports {
                ok &= r.satisfied;
                println!(
                    "{:<14} lhs={:<22} rhs={:<22} slack={:<24} {}",
                    r.name,
                    r.lhs,
                    r.rhs,
                    r.slack,
                    if r.satisfied { "ok" } else { "VIOLATED" }
                );
            }
            if let Err(e) = spec.ensure_convex() {
                println!("{e}");
                ok = false;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
