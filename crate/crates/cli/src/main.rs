//! `renorm`: decomposition tables, topological resolutions, renormalised energies,
//! ball growth and synharmony estimates from the command line.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use renorm::solver::SolverError;
use renorm::topology::TopologyError;

use output::Format;

/// Failure of a command, mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration or arguments (exit 1).
    Config(String),
    /// Charges or loops incompatible with the boundary data (exit 2).
    Topology(String),
    /// Relaxation did not converge (exit 3).
    NonConvergence(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Topology(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Topology(m) => write!(f, "incompatible topology: {m}"),
            Failure::NonConvergence(m) => write!(f, "no convergence: {m}"),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::IncompatibleTopology(_)
            | SolverError::NonHomotopicLoops
            | SolverError::Topology(TopologyError::Incompatible) => Failure::Topology(e.to_string()),
            SolverError::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<TopologyError> for Failure {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::Incompatible => Failure::Topology(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(format!("{e:#}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "renorm", version, about = "Singular and renormalised energies of manifold-valued harmonic maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parameter sweeps; 1 runs everything on the calling thread.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Seed of the perturbed restarts.
    #[arg(long, global = true, env = "RENORM_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decomposition table of the homotopy classes of a manifold.
    Table {
        #[arg(long)]
        manifold: String,
        /// Largest lattice norm listed for tori and the circle.
        #[arg(long, default_value_t = 3.0)]
        norm_bound: f64,
    },
    /// Whether singular charges resolve the boundary data.
    Resolve {
        #[arg(long)]
        manifold: String,
        /// Class of the outer boundary data.
        #[arg(long, allow_hyphen_values = true)]
        outer: String,
        /// Comma separated classes of the singularities.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sing: Vec<String>,
        /// Comma separated classes of inner boundary data.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        inner: Vec<String>,
    },
    /// Renormalised energy of a configuration, or a sweep of one singularity.
    Energy {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the target of the configuration.
        #[arg(long)]
        manifold: Option<String>,
    },
    /// Growth process of a family of balls.
    Balls {
        #[arg(long)]
        config: PathBuf,
    },
    /// Synharmony estimate of two homotopic loops.
    Synharmony {
        #[arg(long)]
        manifold: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma_phase: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta_phase: f64,
        /// Vertices around the cylinder.
        #[arg(long, default_value_t = 64)]
        n_theta: usize,
        /// Comma separated cylinder lengths.
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
