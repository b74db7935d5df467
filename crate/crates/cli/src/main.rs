//! `lipnodal`: meshes, eigenpairs, nodal sets, doubling indices and the
//! falsification checks, one subcommand each.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lipnodal", version, about = "Nodal sets and doubling indices on Lipschitz polygons")]
pub struct Cli {
    /// Seed of every random corpus.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving the artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Triangulate a domain file into mesh.json.
    Mesh {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        h: f64,
    },
    /// Dirichlet eigenpairs of a mesh into solution.json.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = lipnodal::spectral::DEFAULT_TOL)]
        tol: f64,
    },
    /// Nodal set of one eigenfunction into nodal.json and nodal.svg.
    Nodal {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        resolution: f64,
    },
    /// Doubling profile at geometrically spaced radii into doubling.csv.
    Doubling {
        /// Field spec, e.g. "harmonic:Re(z^2)" or "ext:rect:3,2".
        #[arg(long)]
        field: String,
        /// X,Y or X,Y,T.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        rmin: f64,
        #[arg(long)]
        rmax: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Domain file overriding the field's own domain.
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Boundary and inner cubes of a chart into construction.json.
    Construct {
        #[arg(long)]
        patch: PathBuf,
        /// CX,CY,S in world coordinates.
        #[arg(long, allow_hyphen_values = true)]
        cube: String,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Chain of balls from a start point to the maximizer of an eigenfunction into chain.json.
    Chain {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        r: f64,
        /// Mesh size of the eigenfunction solve.
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Run one check (or all) and write <check>.csv and <check>.summary.json.
    Verify {
        check: Check,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Nodal length against sqrt(lambda) for the first eigenfunctions, without a verdict.
    Sweep {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value_t = 0.03)]
        h: f64,
        #[arg(long, default_value_t = 0.005)]
        resolution: f64,
    },
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct VerifyOpts {
    /// Domain file (df-doubling, yau); defaults to the unit square.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Number of eigenpairs (df-doubling, yau).
    #[arg(long)]
    pub count: Option<usize>,
    /// Ball radius (df-doubling).
    #[arg(long)]
    pub r: Option<f64>,
    /// Mesh size when eigenpairs come from FEM.
    #[arg(long)]
    pub h: Option<f64>,
    /// Size of the random corpus.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Nodal extraction resolution (yau).
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Threshold N₀ of the hyperplane experiment.
    #[arg(long)]
    pub n0: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Monotonicity,
    ThreeBall,
    BoundaryThreeBall,
    Subharmonic,
    AlmostMonotonicity,
    Corollary,
    InteriorNodal,
    BoundaryNodal,
    Cauchy,
    Hyperplane,
    DfDoubling,
    Yau,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Outcome::Clean) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Violations(n)) => {
            eprintln!("{n} violation(s)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
