mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::config::ScenarioConfig;
use crate::error::CliError;

const EXIT_CODES: &str = "\
Exit codes: 0 success, 1 runtime failure (I/O, unconverged quadrature),
2 invalid configuration, 3 singular action matrix, 4 resonant coupling.";

/// Transition amplitudes of coupled oscillator lattices, their continuum
/// Green's functions and the four-source twin-slit pattern.
///
/// Each command reads one JSON scenario file and writes a CSV table (header
/// row, comma separated, reals with 17 significant digits) to --out, to
/// output.path in the config, or to stdout. Diagnostics go to stderr;
/// RUST_LOG controls their verbosity (default: warn).
#[derive(Debug, Parser)]
#[command(name = "pathamp", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path. Overrides output.path in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pure mode. Nothing in pathamp draws random numbers, so this only
    /// records the intent; output is identical with or without it.
    #[arg(long)]
    seedless: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form Gaussian amplitude of the configured network and source.
    #[command(after_help = "\
Groups: network, source (optional, default J = 0), quadrature (with --oracle).

Columns:
  epsilon              damping added to the diagonal; 0 for the plain action
  log_magnitude,phase  ln|Z| and arg Z
  det_log_magnitude    ln|det A|
  det_phase            arg det A, wrapped
  source_form_re/_im   J·A⁻¹·J
  exp_log_magnitude    ln|exp(−(i/2) J·A⁻¹·J)|
  exp_phase            its phase
  branch               continuous | principal
  oracle_log_magnitude brute-force quadrature, --oracle rows only
  oracle_phase
  relative_difference  |Z − Z_quad| / |Z_quad|")]
    Amplitude {
        #[command(flatten)]
        common: Common,
        /// Add one row per quadrature.epsilon comparing against brute-force
        /// quadrature (sources × steps ≤ 3).
        #[arg(long)]
        oracle: bool,
    },
    /// Interference pattern over a schedule of slit→detector couplings.
    #[command(after_help = "\
Groups: twinslit (schedule or sweep_points), schrodinger.

Columns:
  index                       position in the schedule; resonant points are
                              skipped with a warning
  k23,k43                     slit→detector couplings
  d23,d43                     coupling coefficients
  discrete_phase_23/_43       Γ d j3 / 2πħ
  phase_difference            discrete_phase_23 − discrete_phase_43
  x23,x43                     inferred slit→detector distances
  schrodinger_phase_23/_43    p x / 2ħ at those distances
  discrete_intensity          |e^{iφ23} + e^{iφ43}|²
  four_source_intensity       including the emitter legs
  schrodinger_intensity       from the free-particle phases
  large_distance              1 if both distances exceed ħ/p, else 0")]
    Twinslit {
        #[command(flatten)]
        common: Common,
    },
    /// Residual of the lattice equations of motion against the continuum.
    #[command(after_help = "\
Groups: network, converge.

Columns:
  dt              lattice spacing
  steps           lattice points in the fixed window
  max_residual    max interior residual
  observed_order  log ratio against the previous row
  order_flag      ok | out_of_range (outside [1.6, 2.4])")]
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Distances inferred from each configured coupling.
    #[command(after_help = "\
Groups: metric, schrodinger.

Columns:
  gamma,k_im          link strength and coupling
  status              ok | sentinel (k = 0 row) | resonant (numbers empty)
  d_im                coupling coefficient
  scale               x_im / (Γ d_im)
  x_im                inferred distance
  pairwise_phase      Γ d_im j / 2πħ
  self_phase          --include-self-terms only
  schrodinger_phase   p x_im / 2ħ, --round-trip only")]
    Metric {
        #[command(flatten)]
        common: Common,
        /// Add the self-interaction phase column.
        #[arg(long)]
        include_self_terms: bool,
        /// Add the free-particle phase rebuilt from x_im.
        #[arg(long)]
        round_trip: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Amplitude { common, .. }
        | Command::Twinslit { common }
        | Command::Converge { common }
        | Command::Metric { common, .. } => common,
    };
    if common.seedless {
        info!("seedless mode");
    }
    let cfg = ScenarioConfig::load(&common.config)?;
    let text = match &cli.command {
        Command::Amplitude { oracle, .. } => commands::amplitude(&cfg, *oracle)?,
        Command::Twinslit { .. } => commands::twinslit(&cfg)?,
        Command::Converge { .. } => commands::converge(&cfg)?,
        Command::Metric {
            include_self_terms,
            round_trip,
            ..
        } => commands::metric(&cfg, *include_self_terms, *round_trip)?,
    };
    match common.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
