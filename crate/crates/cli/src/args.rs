//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "dkp",
    version,
    about = "Relativistic boson step scattering and wave-packet evolution"
)]
pub struct Cli {
    /// Directory that receives one subdirectory per run.
    #[arg(long, global = true, default_value = "runs")]
    pub runs_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the β matrices of a representation, one "a+bi" entry per cell.
    DumpRep(DumpRepArgs),
    /// Check every algebraic identity of the representations.
    VerifyAlgebra(VerifyArgs),
    /// j and S currents of a plane wave.
    Currents(CurrentsArgs),
    /// Solve one step-potential problem.
    Scatter(ScatterArgs),
    /// Solve a family of step problems over one parameter.
    Sweep(SweepArgs),
    /// Evolve a wave packet through a step.
    Evolve(EvolveArgs),
    /// Turn a run's outputs into plot-ready CSV.
    PlotData(PlotArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Flat `key = value` file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one key, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DumpRepArgs {
    #[command(flatten)]
    pub common: Common,
    /// spin0 or spin1
    #[arg(long)]
    pub rep: Option<String>,
    /// beta0..beta3, eta0, beta_tilde1..beta_tilde3, gamma or all
    #[arg(long)]
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// spin0, spin1 or both
    #[arg(long)]
    pub rep: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CurrentsArgs {
    #[command(flatten)]
    pub common: Common,
    /// spin0, spin1 or photon
    #[arg(long)]
    pub particle: Option<String>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Scalar potential of the region the wave lives in (spin0 only).
    #[arg(long = "V", allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// plus or minus
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amp_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub amp_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    /// spin0, spin1, photon, dirac or kg
    #[arg(long)]
    pub particle: Option<String>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Step height (minimal coupling).
    #[arg(long = "V", allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// Permittivity of the far side.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Wavenumber ratio k'/k (refractive index for photons).
    #[arg(long)]
    pub ratio: Option<f64>,
    /// pos or neg: sign of a real far-side wavenumber (contrast solvers).
    #[arg(long)]
    pub branch: Option<String>,
    /// S, j or poynting
    #[arg(long)]
    pub current: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// k0, mass, V, eps or ratio
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Extra copy of the CSV outside the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// spin0, photon or dkp-free
    #[arg(long)]
    pub particle: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Representation for dkp-free: spin0 or spin1.
    #[arg(long)]
    pub rep: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: Common,
    /// Run directory to read.
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// R_vs_param, snapshot_heatline or flux_vs_time
    #[arg(long)]
    pub kind: Option<String>,
    /// Snapshot time for snapshot_heatline (default: last).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Extra copy of the CSV outside the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
