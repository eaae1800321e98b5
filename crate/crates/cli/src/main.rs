//! `geoflow`: build geodesic automata, run the thermodynamic and distortion
//! pipelines on a group file, and emit JSON reports with CSV tables.
//!
//! Exit status is 0 on success, 1 when a computed verdict fails and 2 on
//! usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "geoflow",
    version,
    about = "Geodesic automata, pressure and mean distortion for hyperbolic groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a geodesic automaton and report its states and transitions.
    Automaton {
        #[command(flatten)]
        set: GensArgs,
        /// Also write the automaton in its text form.
        #[arg(long)]
        save: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Growth rate from the automaton's spectral radius, with sphere sizes.
    Growth {
        #[command(flatten)]
        set: GensArgs,
        /// Largest radius for sphere sizes and the regular-growth constants.
        #[arg(long, default_value_t = 25)]
        n_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recurrent components of the shift, their periods and pressures.
    Components {
        #[command(flatten)]
        set: GensArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equilibrium measures of the word-metric potential on maximal
    /// components, with the variational check and the Gibbs ratio scan.
    Gibbs {
        #[command(flatten)]
        set: GensArgs,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Longest block in the Gibbs ratio scan.
        #[arg(long, default_value_t = 10)]
        block_length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mean distortion of one generating set against another.
    Distortion {
        #[command(flatten)]
        pair: PairArgs,
        /// Exact sphere averages up to this radius.
        #[arg(long, default_value_t = 6)]
        exact_max: usize,
        /// Radii of the law-of-large-numbers check; skipped when empty.
        #[arg(long, value_delimiter = ',')]
        lln_n: Vec<usize>,
        /// Relative deviations counted as outliers.
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
        eps: Vec<f64>,
        /// Radius of the rough-similarity scan; 0 skips it.
        #[arg(long, default_value_t = 0)]
        similarity_radius: usize,
        /// Extra radius searched beyond the scan for target geodesics.
        #[arg(long, default_value_t = 2)]
        similarity_margin: usize,
        /// Base words whose powers the similarity scan follows.
        #[arg(long, value_delimiter = ',')]
        rays: Vec<String>,
        /// Write the per-radius table `n,exact,mc_mean,mc_stderr,samples`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dimension of the sphere-counting measure in a foreign gauge.
    Dimension {
        #[command(flatten)]
        pair: PairArgs,
        /// Sampled rays whose local dimensions go to the CSV.
        #[arg(long, default_value_t = 20)]
        diagnostic_rays: usize,
        /// Write the table `ray,k,length_sstar,local_dimension`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare automaton path counts with breadth-first sphere sizes.
    Validate {
        #[command(flatten)]
        set: GensArgs,
        /// Largest radius compared.
        #[arg(short = 'N', long = "n-max", default_value_t = 12)]
        n_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance battery on the built-in groups.
    Battery {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Criteria to run, by number; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Group file.
    #[arg(long)]
    pub group: PathBuf,
    /// Cone-type neighbourhood depth tried first.
    #[arg(short = 'L', long, default_value_t = 1)]
    pub level: usize,
    /// Radius through which the automaton must match breadth-first search.
    #[arg(long, default_value_t = 8)]
    pub check: usize,
    /// Element budget of every ball explored.
    #[arg(long, default_value_t = geoflow::group::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GensArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    /// Generating set name; `S` is the base set.
    #[arg(long, default_value = "S")]
    pub gens: String,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    /// Generating set whose spheres are sampled.
    #[arg(long, default_value = "S")]
    pub from: String,
    /// Generating set in which lengths are measured.
    #[arg(long)]
    pub to: String,
    /// Sphere radii of the Monte Carlo estimate.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub n: Vec<usize>,
    /// Samples per radius.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Longest word search for foreign lengths.
    #[arg(long, default_value_t = geoflow::group::DEFAULT_CAP)]
    pub cap: u32,
    /// Words longer than this use the calibrated tube search; 0 keeps every
    /// length exact.
    #[arg(long, default_value_t = 8)]
    pub exact_below: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Write the JSON report here, with wall-clock times beside it in
    /// `<out>.timing.json`; the report goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
