mod commands;
mod config;
mod output;
mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_classify, cmd_evolve, cmd_ground, cmd_pairs, Failure};
use crate::config::RunConfig;

/// Exit statuses shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok,
    /// Bad configuration or a failed computation.
    Error,
    /// Ground-state solver hit its iteration cap.
    NoConvergence,
    /// `pairs`: some exponent check failed.
    ChecksFailed,
    Blowup,
    /// The evolution could not be continued, or some sweep points failed.
    Unresolved,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        match self {
            ExitCode::Ok => 0,
            ExitCode::Error => 1,
            ExitCode::NoConvergence | ExitCode::ChecksFailed => 2,
            ExitCode::Blowup => 3,
            ExitCode::Unresolved => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "inls-lab",
    version,
    about = "Radial inhomogeneous NLS laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state and write its profile and invariants.
    Ground(Common),
    /// Evolve the initial data; exit 0 at t_end, 3 on blow-up, 4 when unresolved.
    Evolve(Common),
    /// Predict global existence or blow-up for the initial data, optionally checking by evolution.
    Classify(Common),
    /// Verify the exponent constructions that apply to the model.
    Pairs(Common),
    /// Run a parameter sweep and write phase.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        workers: Option<usize>,
        /// Skip points whose run directory is complete.
        #[arg(long)]
        resume: bool,
    },
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let common = match &cli.command {
        Command::Ground(c) | Command::Evolve(c) | Command::Classify(c) | Command::Pairs(c) => c,
        Command::Sweep { common, .. } => common,
    };
    let cfg = RunConfig::load(&common.config)?;
    let out = common
        .output
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    match &cli.command {
        Command::Ground(_) => cmd_ground(&cfg, &out),
        Command::Evolve(_) => cmd_evolve(&cfg, &out),
        Command::Classify(_) => cmd_classify(&cfg, &out),
        Command::Pairs(_) => cmd_pairs(&cfg, &out),
        Command::Sweep {
            workers, resume, ..
        } => sweep::cmd_sweep(&cfg, &out, *workers, *resume),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INLS_LAB_LOG", "error")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    std::process::exit(code.code());
}
