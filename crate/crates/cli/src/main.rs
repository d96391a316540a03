//! `su2tomo`: simulate, reconstruct and analyze spin-j phase-space
//! tomography experiments.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use su2_tomography::frontends::JcSolver;

#[derive(Parser, Debug)]
#[command(name = "su2tomo", version, about = "Spin-j phase-space tomography simulator")]
pub struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; defaults to the configured one, then `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured shots per grid point (0 = exact).
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Runs every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate displaced-projector measurements on the configured grid.
    Simulate,
    /// Reconstruct the density matrix from a measurement or probability CSV.
    Reconstruct {
        /// CSV written by `simulate`; without it the data are simulated.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also write the nearest physical state.
        #[arg(long)]
        project: bool,
    },
    /// Evaluate s-parametrized quasiprobability distributions.
    Qpd {
        /// Density JSON or probability CSV; without it the data are simulated.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Values of s; defaults to the configured list.
        #[arg(long = "s", allow_hyphen_values = true, value_delimiter = ',')]
        s: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Route::Multipole)]
        route: Route,
        /// Oversampling of the output grid.
        #[arg(long)]
        oversample: Option<f64>,
    },
    /// Reconstruction error against shot count over repeated seeds.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u64>,
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Simulate and invert Jaynes-Cummings phonon readout.
    Jc {
        #[arg(long, value_delimiter = ',')]
        populations: Vec<f64>,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Through the reconstructed multipoles.
    Multipole,
    /// Directly from the probabilities with the spherical kernel.
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Nnls,
    LeastSquares,
}

impl From<SolverArg> for JcSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Nnls => JcSolver::Nnls,
            SolverArg::LeastSquares => JcSolver::LeastSquares,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    match commands::run(&cli) {
        Ok(()) => {
            eprintln!("done in {:.3} s", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("su2tomo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
