//! `scatlev` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Failed(String),
    #[error("output error: {0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] scatlev::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use scatlev::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Lib(e) => match e {
                E::Range(_) | E::Cutoff { .. } => 3,
                E::Contract(_) | E::RhoHypothesis(_) | E::Divergent { .. } => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "scatlev", version, about = "Wave-operator structure and Levinson winding numbers in one dimension")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir` from the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override for the number of grid points.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Override for the seed of randomized test vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for internal sweeps.
    #[arg(long, env = "SCATLEV_WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Energy sweep of the scattering matrix and the bound-state summary.
    Smatrix,
    /// Winding numbers of the boundary symbol and the time-delay integral.
    Levinson,
    /// Structure-formula residual, remainder kernel and the two realizations of T.
    VerifyStructure,
    /// Restricted-norm decay curves.
    Asymptotics,
    /// Closed-form point interaction.
    Point,
}

impl Command {
    fn tag(self) -> &'static str {
        match self {
            Command::Smatrix => "smatrix",
            Command::Levinson => "levinson",
            Command::VerifyStructure => "verify-structure",
            Command::Asymptotics => "asymptotics",
            Command::Point => "point",
        }
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    let tag = cli.command.tag();
    if let Some(c) = &cfg.command {
        if c != tag {
            return Err(CliError::Config(format!("`command = \"{c}\"` does not match the invoked command `{tag}`")));
        }
    }
    if let Some(n) = cli.grid_n {
        cfg.grid.n = n;
        if let Some(a) = &mut cfg.asymptotics {
            a.n = n;
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("SCATLEV_WORKERS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {w} workers: {e}")))?;
    }
    let out = cli.out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Smatrix => commands::smatrix(&cfg, out, tag),
        Command::Levinson => commands::levinson(&cfg, out, tag),
        Command::VerifyStructure => commands::verify_structure(&cfg, out, tag),
        Command::Asymptotics => commands::asymptotics(&cfg, out, tag),
        Command::Point => commands::point(&cfg, out, tag),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                let e = CliError::Failed(outcome.failures.join("; "));
                eprintln!("scatlev: {e}");
                ExitCode::from(e.exit_code())
            }
        }
        Err(e) => {
            eprintln!("scatlev: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
