//! `gil`: runs the gil-core checks on bodies, measures and query sets
//! loaded from JSON.
//!
//! Every command except `generate` writes one JSON check report (to `--out`,
//! or stdout) with the run's knobs recorded under `config`, plus an
//! optional CSV (`--csv`) and an optional artifact (`--artifact`: a body
//! file for `polar` and `harmonic`, a region for `gauss-image`). Exit
//! status is 0 when the check passes, 1 when it fails and 2 on bad input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gil", version, about = "Radial Gauss image checks for convex polytopes")]
struct Cli {
    /// Worker threads for the library's parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cube,
    Cross,
    Frustum,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UniquenessCheck {
    Ae,
    SimultaneousMap,
    RatioIncrement,
}

/// Output destinations shared by the checking commands.
#[derive(Args, Debug, Clone)]
pub struct Outputs {
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV path for the command's rows.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Family {
    /// Largest cell diameter of the test family, radians.
    #[arg(long, default_value_t = 0.5)]
    family_diameter: f64,
    /// Root seed for the family rotation and all sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Writes a canonical body file.
    Generate {
        kind: Kind,
        /// Half edge of the cube or vertex distance of the cross-polytope.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Vertex count for random bodies.
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Body file path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polar body and the double-polar round trip.
    Polar {
        #[arg(long)]
        k: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Float)]
        mode: Mode,
        /// Body file for the polar.
        #[arg(long)]
        artifact: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Radial Gauss image of a query set, with the boundary inclusion check.
    GaussImage {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Compute the reverse image instead.
        #[arg(long)]
        reverse: bool,
        /// Boundary points to test.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Region file for the image.
        #[arg(long)]
        artifact: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Gauss image measure of a query set.
    Measure {
        #[arg(long)]
        k: PathBuf,
        /// Optional second body to compare against.
        #[arg(long)]
        l: Option<PathBuf>,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Monte Carlo samples for the area cross-check (uniform measure).
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Harmonic-mean path between two bodies.
    Harmonic {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        /// Grid points on [0, 1], endpoints included.
        #[arg(long, default_value_t = 11)]
        t_count: usize,
        /// Directions per grid point for the radial identity.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the body at this `t` to `--artifact`.
        #[arg(long, requires = "artifact")]
        t: Option<f64>,
        #[arg(long)]
        artifact: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Hausdorff distances of Gauss images along the path against the radii bound.
    LipschitzScan {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 200)]
        t_count: usize,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Covering of the image difference by the swept boundary images.
    SweepCheck {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        /// A polygon query set.
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 2000)]
        t_count: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Almost-everywhere equality of the Gauss image maps and its consequences.
    UniquenessCheck {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long, value_enum, default_value_t = UniquenessCheck::Ae)]
        check: UniquenessCheck,
        /// Largest union of adjacent cells tested.
        #[arg(long, default_value_t = 3)]
        max_union: usize,
        /// Samples per support component.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Bound on the smallest-separation ratio increments.
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Mode::Float)]
        mode: Mode,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Per-component dilation ratios.
    DilationCheck {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Sign of ρ_K − ρ_L on each family cell.
    RatioPartition {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        /// Barycentric steps per fan triangle.
        #[arg(long, default_value_t = 4)]
        grid: usize,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        outputs: Outputs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("gil: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gil: {e}");
            ExitCode::from(2)
        }
    }
}
