//! Command-line driver for the pulsed characteristic-function protocol.
//!
//! Four subcommands cover the workflow end to end: `points` tabulates the
//! displacement each configured pulse sequence reaches, `measure` produces
//! characteristic-function samples (analytic or through the density-matrix
//! oracle), `reconstruct` runs the interpolation and fidelity scan, and
//! `verify` reports residuals for the closed-form identities.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 coverage failure. All outputs are deterministic; rerunning with the same
//! configuration reproduces files byte for byte.

mod cmd_measure;
mod cmd_points;
mod cmd_reconstruct;
mod cmd_verify;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{ModeKind, RunConfig};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, bad flags, or unwritable output locations.
    Config(String),
    /// A residual or iteration failed to reach tolerance.
    Nonconv(String),
    /// The sample cloud cannot support the requested reconstruction.
    Coverage(String),
    /// Failure propagated from the protocol library.
    Numeric(pulsechi::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Nonconv(_) => 3,
            Self::Coverage(_) => 4,
            Self::Numeric(e) => match e {
                pulsechi::Error::Domain { .. }
                | pulsechi::Error::EmptySequence
                | pulsechi::Error::IndexRange { .. }
                | pulsechi::Error::DegenerateProbe
                | pulsechi::Error::Io(_) => 2,
                pulsechi::Error::Coverage { .. } => 4,
                _ => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "{m}"),
            Self::Nonconv(m) => write!(f, "{m}"),
            Self::Coverage(m) => write!(f, "{m}"),
            Self::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<pulsechi::Error> for CliError {
    fn from(e: pulsechi::Error) -> Self {
        Self::Numeric(e)
    }
}

#[derive(Parser)]
#[command(
    name = "pulsechi-cli",
    version,
    about = "Pulsed characteristic-function readout: points, samples, reconstruction, verification"
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override oscillator frequency nu
    #[arg(long, global = true)]
    nu: Option<f64>,

    /// Override damping rate gamma
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Override bath occupation nbar
    #[arg(long, global = true)]
    nbar: Option<f64>,

    /// Override coupling strength g
    #[arg(long, global = true)]
    g: Option<f64>,

    /// Output directory (also PULSECHI_OUT_DIR; the flag wins)
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Output file prefix
    #[arg(long, global = true)]
    prefix: Option<String>,

    /// Worker threads (also PULSECHI_JOBS; the flag wins)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Also write a gnuplot script for the produced files
    #[arg(long, global = true)]
    emit_plotscript: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the displacement reached by every configured sequence
    Points,
    /// Produce characteristic-function samples over the configured sweep
    Measure {
        /// analytic or oracle
        #[arg(long)]
        mode: Option<String>,
        /// Fock dimension for the oracle mode
        #[arg(long)]
        oracle_dim: Option<usize>,
    },
    /// Interpolate the sample cloud and scan fidelity over damping
    Reconstruct,
    /// Report residuals for the closed-form identities
    Verify {
        /// Fock dimension for the residual checks
        #[arg(long)]
        dim: Option<usize>,
    },
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    if let Some(nu) = cli.nu {
        config.oscillator.nu = nu;
    }
    if let Some(gamma) = cli.gamma {
        config.oscillator.gamma = gamma;
    }
    if let Some(nbar) = cli.nbar {
        config.oscillator.nbar = nbar;
    }
    if let Some(g) = cli.g {
        config.oscillator.g = g;
    }
    if let Some(dir) = cli
        .out_dir
        .clone()
        .or_else(|| env_var("PULSECHI_OUT_DIR").map(PathBuf::from))
    {
        config.output.dir = dir;
    }
    if let Some(prefix) = cli.prefix.clone() {
        config.output.prefix = prefix;
    }

    match &cli.command {
        Command::Measure { mode, oracle_dim } => {
            if let Some(kind) = mode.as_deref() {
                config.mode.kind = match kind {
                    "analytic" => ModeKind::Analytic,
                    "oracle" => ModeKind::Oracle,
                    other => {
                        return Err(CliError::config(format!(
                            "unknown mode {other:?}, expected analytic or oracle"
                        )))
                    }
                };
            }
            if let Some(d) = oracle_dim {
                config.mode.oracle_dim = *d;
            }
        }
        Command::Verify { dim } => {
            if let Some(d) = dim {
                config.verify.dim = *d;
            }
        }
        _ => {}
    }

    let jobs = match cli.jobs.or_else(|| {
        env_var("PULSECHI_JOBS").map(|v| {
            v.parse::<usize>().unwrap_or(0) // 0 rejected below
        })
    }) {
        Some(0) => return Err(CliError::config("jobs must be a positive integer")),
        Some(n) => Some(n),
        None => None,
    };
    if let Some(n) = jobs {
        pulsechi::par::configure_threads(n);
    }

    let validated = config.validate()?;

    match cli.command {
        Command::Points => cmd_points::run(&validated, cli.emit_plotscript),
        Command::Measure { .. } => cmd_measure::run(&validated, cli.emit_plotscript),
        Command::Reconstruct => cmd_reconstruct::run(&validated, cli.emit_plotscript),
        Command::Verify { .. } => cmd_verify::run(&validated),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
