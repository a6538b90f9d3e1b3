//! Command-line surface of the two-mode interferometry workbench.
//!
//! Subcommands: `criteria` (criterion rows over a coupling sweep), `figure`
//! (published curve families as CSV + SVG), `estimate` (Monte Carlo phase
//! estimation report), `state` (single-state inspection dump).
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::figure::FigureName;
use commands::AppError;
use config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "pqslab",
    version,
    about = "Two-mode interferometry workbench: number-robust entanglement criteria,\n\
             two-well ground states, planar squeezing and phase-estimation Monte Carlo",
    after_help = "CSV schema of `criteria` (floats use 17 significant digits):\n\
                  coupling,mean_n,mean_n_plus,mean_jx_t,var_jx_t,var_jy_t,var_jz_t,e_hz,e_ph,\n\
                  xi_s_y,xi_s_z,xi_s_ph_y,xi_s_ph_z,eta_ph,entangled_modes,entangled_particles,\n\
                  subshot_all_angles,mz_phase,delta_phi_worst[,delta_phi_<i>...]\n\
                  xi_s_y/xi_s_z are empty unless the number model is `fixed`."
)]
struct Cli {
    /// Worker threads (0 = automatic, or the PQSLAB_THREADS env var)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write outputs into this directory instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed for Monte Carlo subcommands
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output format for `criteria`
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement/squeezing criteria over a g/kappa sweep (CSV or JSON)
    Criteria {
        /// Flat key-value config file (`key = value` lines)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one config key, e.g. --set mean_n=200 (repeatable)
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Reproduce a published curve family: data table + SVG + metadata
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Monte Carlo estimation of an unknown phase (JSON report)
    Estimate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set")]
        set: Vec<String>,
        /// Shots per measurement setting
        #[arg(long)]
        shots: Option<usize>,
        /// Independent repetitions per phase
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Dump one sector state: amplitudes, moments and criteria (JSON)
    State {
        /// phase | coherent | pqs-gaussian | pqs-optimal | ground
        #[arg(long)]
        kind: String,
        /// Total particle number of the sector
        #[arg(long)]
        n: u64,
        /// g/kappa for the ground state
        #[arg(long, default_value_t = 0.0)]
        coupling: f64,
        /// Gaussian envelope width (defaults to the optimal PQS width)
        #[arg(long)]
        sigma_m: Option<f64>,
        /// Phase offset for phase / pqs-gaussian states
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 1e-10)]
        pqs_tol: f64,
        #[arg(long, default_value_t = 500)]
        pqs_max_iters: u32,
    },
}

fn load_config(path: Option<&PathBuf>, sets: &[String]) -> Result<Config, AppError> {
    let mut cfg = match path {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    cfg.apply_overrides(sets)?;
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn setup_threads(threads: usize) {
    let n = if threads > 0 {
        threads
    } else {
        std::env::var("PQSLAB_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    if n > 0 {
        // ignore the error if a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn setup_threads(_threads: usize) {}

fn run(cli: Cli) -> Result<(), AppError> {
    setup_threads(cli.threads);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Criteria { config, set } => {
            let cfg = load_config(config.as_ref(), set)?;
            commands::criteria::run(&cfg, out, cli.format)
        }
        Command::Figure { name, config, set } => {
            let cfg = load_config(config.as_ref(), set)?;
            commands::figure::run(*name, &cfg, out)
        }
        Command::Estimate {
            config,
            set,
            shots,
            trials,
        } => {
            let cfg = load_config(config.as_ref(), set)?;
            commands::estimate::run(&cfg, out, cli.seed, *shots, *trials)
        }
        Command::State {
            kind,
            n,
            coupling,
            sigma_m,
            theta,
            pqs_tol,
            pqs_max_iters,
        } => commands::state::run(
            &commands::state::StateArgs {
                kind: kind.clone(),
                n: *n,
                coupling: *coupling,
                sigma_m: *sigma_m,
                theta: *theta,
                pqs_tol: *pqs_tol,
                pqs_max_iters: *pqs_max_iters,
            },
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ AppError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ AppError::Numerical(_)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
