//! `period3` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 sweep finished with failed points. `PERIOD3_THREADS` caps the worker
//! count for parallel sweeps and ensembles.

mod commands;
mod config;
mod dataset;
mod figures;

use clap::{Args, Parser, Subcommand};
use config::{ConfigError, RunConfig};
use dataset::Dataset;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("[E_FIGURE] unknown figure `{0}`")]
    UnknownFigure(String),
    #[error("{context}: {source}")]
    Numeric { context: String, source: period3::Error },
    #[error("{failed} of {total} sweep points failed")]
    PartialSweep { failed: usize, total: usize },
    #[error("[E_IO] {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::UnknownFigure(_) | CliError::Io(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::PartialSweep { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "period3", version, about = "Quantum kinetics of an oscillator driven near triple its eigenfrequency")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    nbar: Option<String>,
    #[arg(long = "sign-delta", global = true, allow_hyphen_values = true)]
    sign_delta: Option<String>,
    #[arg(long = "g-points", global = true)]
    g_points: Option<String>,
    #[arg(long = "f-points", global = true)]
    f_points: Option<String>,
    #[arg(long = "kappa-points", global = true)]
    kappa_points: Option<String>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<String>,
    #[arg(long, global = true)]
    trajectories: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quasienergy levels and below-saddle triplets.
    Spectrum,
    /// Classical orbit data over the well.
    Orbits,
    /// Stationary distribution, eikonal slope and activation energy.
    Kinetics,
    /// Slow-mode escape near the bifurcation.
    Escape,
    /// Stationary states and the saddle-node reduction.
    Bifurcation,
    /// Dataset behind one figure.
    Figure { id: String },
    /// Parameter sweep of one operation.
    Sweep {
        /// Operation name (overrides `sweep_op`).
        #[arg(long)]
        op: Option<String>,
        /// Comma-separated f values.
        #[arg(long = "over-f")]
        over_f: Option<String>,
        /// Comma-separated nbar values.
        #[arg(long = "over-nbar")]
        over_nbar: Option<String>,
        /// Comma-separated kappa values.
        #[arg(long = "over-kappa")]
        over_kappa: Option<String>,
    },
}

impl Common {
    /// Flags as a config layer; values go through the same validation as file keys.
    fn layer(&self) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig::default();
        let pairs = [
            ("f", &self.f),
            ("lambda", &self.lambda),
            ("kappa", &self.kappa),
            ("nbar", &self.nbar),
            ("sign_delta", &self.sign_delta),
            ("g_points", &self.g_points),
            ("f_points", &self.f_points),
            ("kappa_points", &self.kappa_points),
            ("n_max", &self.n_max),
            ("trajectories", &self.trajectories),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        c.seed = self.seed;
        c.out = self.out.clone();
        Ok(c)
    }
}

fn write_all(sets: &[Dataset], cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    let provenance = vec![("command".to_string(), command.to_string()), ("config".to_string(), cfg.to_string())];
    let dir = cfg.out_dir();
    for d in sets {
        let path = d.write(&dir, &provenance).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        println!("wrote {} ({} rows)", path.display(), d.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = file.merge(cli.common.layer()?);
    let (name, sets) = match &cli.command {
        Command::Spectrum => ("spectrum".to_string(), commands::spectrum_cmd(&cfg)?),
        Command::Orbits => ("orbits".into(), commands::orbits_cmd(&cfg)?),
        Command::Kinetics => ("kinetics".into(), commands::kinetics_cmd(&cfg)?),
        Command::Escape => ("escape".into(), commands::escape_cmd(&cfg)?),
        Command::Bifurcation => ("bifurcation".into(), commands::bifurcation_cmd(&cfg)?),
        Command::Figure { id } => {
            cfg.set("figure", id).map_err(|_| CliError::UnknownFigure(id.clone()))?;
            (format!("figure {id}"), figures::run_figure(id, &cfg)?)
        }
        Command::Sweep { op, over_f, over_nbar, over_kappa } => {
            for (k, v) in
                [("sweep_op", op), ("sweep_f", over_f), ("sweep_nbar", over_nbar), ("sweep_kappa", over_kappa)]
            {
                if let Some(v) = v {
                    cfg.set(k, v)?;
                }
            }
            let (sets, failed) = commands::sweep_cmd(&cfg)?;
            write_all(&sets, &cfg, "sweep")?;
            let total = sets[0].len();
            if failed > 0 {
                return Err(CliError::PartialSweep { failed, total });
            }
            return Ok(());
        }
    };
    write_all(&sets, &cfg, &name)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("period3: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
