use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand};

use crate::error::Error;

use super::units::YEAR;
use super::{preset, write_outputs, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "h2flow", about = "Water-hydrogen two-phase flow simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write line-cut records plus a summary.
    #[command(group(ArgGroup::new("input").required(true).args(["case", "config"])))]
    Simulate {
        /// Built-in benchmark case.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: Option<u8>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Override the number of cells along x.
        #[arg(long)]
        nx: Option<usize>,
        /// Override the number of cells along y.
        #[arg(long)]
        ny: Option<usize>,
    },
    /// Check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the derived constants of the configured fluids.
    Constants {
        /// Defaults to the benchmark fluids.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum Failure {
    Config(Error),
    Solver(Error),
}

fn load(case: Option<u8>, config: Option<&PathBuf>) -> Result<ScenarioConfig, Failure> {
    match (case, config) {
        (Some(c), _) => preset(c),
        (None, Some(p)) => ScenarioConfig::from_file(p),
        (None, None) => preset(1),
    }
    .map_err(Failure::Config)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Simulate {
            case,
            config,
            out: dir,
            nx,
            ny,
        } => {
            let mut cfg = load(case, config.as_ref())?;
            if let Some(nx) = nx {
                cfg.grid.nx = nx;
            }
            if let Some(ny) = ny {
                cfg.grid.ny = ny;
            }
            let scenario = cfg.build().map_err(Failure::Config)?;
            let run = scenario.run().map_err(Failure::Solver)?;
            let files = write_outputs(&scenario, &run, &dir).map_err(Failure::Config)?;
            let s = &run.summary;
            let yr = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{:.4e}", t / YEAR));
            let _ = writeln!(
                out,
                "{}: T1 = {} y, T2 = {} y, T3 = {} y, {} steps, {} files in {}",
                scenario.name,
                yr(s.t1),
                yr(s.t2),
                yr(s.t3),
                s.steps,
                files.len(),
                dir.display()
            );
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::from_file(&config).map_err(Failure::Config)?;
            let s = cfg.build().map_err(Failure::Config)?;
            let _ = writeln!(out, "{}: ok ({} cells)", s.name, s.problem.n_cells());
        }
        Command::Constants { config } => {
            let cfg = load(None, config.as_ref())?;
            let c = cfg.params().map_err(Failure::Config)?.consts;
            let _ = writeln!(out, "C_h = {:e} 1/Pa", c.c_h);
            let _ = writeln!(out, "C_v = {:e} 1/Pa", c.c_v);
            let _ = writeln!(out, "C_delta = {:e} 1/Pa", c.c_delta);
            let _ = writeln!(out, "F = {}", c.f);
            let _ = writeln!(out, "G = {}", c.g);
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Solver(e)) => {
            let _ = writeln!(err, "solver failure: {e}");
            EXIT_SOLVER
        }
    }
}
