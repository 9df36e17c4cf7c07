use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use csf_core::flow::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "csf",
    version,
    about = "Curve shortening flow near Abresch-Langer curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the stationary profile h_{m,n} and report its invariants.
    Profile,
    /// Run the normalized flow from h_ε for each --eps.
    Evolve,
    /// Run the acceptance checks and write a pass/fail table.
    Verify,
    /// Run every ε on a worker pool and check the saddle dichotomy.
    Sweep,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Rotation index m.
    #[arg(long, global = true, default_value_t = 2)]
    pub m: u32,
    /// Number of leaves n.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: u32,
    /// Perturbation size; repeat for several runs.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Vec<f64>,
    /// Number of grid nodes on [0, 2mπ].
    #[arg(long = "grid-n", global = true, default_value_t = 512)]
    pub grid_n: usize,
    #[arg(long, global = true, default_value_t = 0.2)]
    pub cfl: f64,
    /// Horizon in normalized time τ.
    #[arg(long = "tau-max", global = true, default_value_t = 100.0)]
    pub tau_max: f64,
    /// Curvature level declared as blowup.
    #[arg(long = "kappa-cap", global = true, default_value_t = 1e3)]
    pub kappa_cap: f64,
    #[arg(long = "record-every", global = true, default_value_t = 0.01)]
    pub record_every: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Command,
    pub m: u32,
    pub n: u32,
    pub eps: Vec<f64>,
    pub grid_n: usize,
    pub run: RunConfig,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    /// Checks the options that do not depend on the class. Class
    /// admissibility is reported by the commands themselves.
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let o = &cli.opts;
        let run = RunConfig {
            cfl: o.cfl,
            horizon: o.tau_max,
            kappa_cap: o.kappa_cap,
            record_every: o.record_every,
            ..RunConfig::default()
        };
        // The verification suite reports an unusable run configuration as
        // failed checks rather than refusing to start.
        if cli.command != Command::Verify {
            run.validate()?;
        }
        if o.grid_n < csf_core::Grid::MIN_SAMPLES || !o.grid_n.is_multiple_of(2) {
            bail!(
                "--grid-n must be even and at least {}",
                csf_core::Grid::MIN_SAMPLES
            );
        }
        if o.jobs == Some(0) {
            bail!("--jobs must be positive");
        }
        if o.eps.iter().any(|e| !e.is_finite()) {
            bail!("--eps values must be finite");
        }
        Ok(Self {
            scenario: cli.command,
            m: o.m,
            n: o.n,
            eps: o.eps.clone(),
            grid_n: o.grid_n,
            run,
            out: o.out.clone(),
            jobs: o.jobs,
        })
    }
}
