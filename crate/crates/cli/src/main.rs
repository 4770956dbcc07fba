//! `ptd` — phase-transition detection in frame sequences.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ptd_cli::commands::{
    cmd_detect, cmd_dimest, cmd_rasterize, cmd_rerun, cmd_simulate, cmd_verify, DetectArgs,
    DimestArgs, RasterizeArgs, SimulateArgs, VerifyArgs,
};
use ptd_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "ptd",
    version,
    about = "Detect abrupt phase transitions in multi-agent frame sequences via local singular-value ratios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the swarm simulator and write a trajectory CSV.
    Simulate {
        /// Output directory for trajectory.csv and manifest.txt.
        #[arg(long)]
        out: PathBuf,
        /// Flat key-value config file (particles, steps, delta, speed,
        /// radius, box_side, schedule, seed).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the seed from the config file or default.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a trajectory into PGM frames and a frame-matrix file.
    Rasterize {
        /// Trajectory CSV produced by `simulate`.
        #[arg(long)]
        trajectory: PathBuf,
        /// Output directory for frame_NNNN.pgm, frames.fmat, manifest.txt.
        #[arg(long)]
        out: PathBuf,
        /// Image side in pixels.
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Filter kernel side in pixels.
        #[arg(long, default_value_t = 10)]
        kernel_size: usize,
        /// Filter kernel standard deviation in pixels.
        #[arg(long, default_value_t = 10.0)]
        kernel_std: f64,
        /// Side of the simulation box the trajectory lives in.
        #[arg(long, default_value_t = 5.0)]
        box_side: f64,
    },
    /// Rank phase-transition candidates in a frame sequence.
    Detect {
        /// A frames.fmat file, a directory of frame_*.pgm files, or a glob.
        #[arg(long)]
        input: PathBuf,
        /// Output directory for report.txt, CSVs, and SVG plots.
        #[arg(long)]
        out: PathBuf,
        /// Neighborhood size (number of frames, the frame itself included).
        #[arg(long, conflicts_with = "alpha_sweep")]
        alpha: Option<usize>,
        /// Run one detection per alpha in an inclusive range, e.g. 2..9.
        #[arg(long, value_parser = parse_sweep)]
        alpha_sweep: Option<(usize, usize)>,
        /// Number of transitions to select.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Non-maximum suppression window (defaults to alpha).
        #[arg(long)]
        suppression: Option<usize>,
        /// Subtract the neighborhood mean frame before the decomposition.
        #[arg(long)]
        center: bool,
    },
    /// Estimate embedding dimensionality of frame ranges.
    Dimest {
        /// A frames.fmat file (or PGM directory/glob).
        #[arg(long)]
        input: PathBuf,
        /// Output directory for residual CSVs and summary.txt.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated inclusive 1-based ranges, e.g. 1-50,51-99.
        #[arg(long)]
        ranges: String,
        /// Neighborhood size for the geodesic graph.
        #[arg(long)]
        alpha: usize,
        /// Largest embedding dimension to score.
        #[arg(long, default_value_t = 10)]
        dmax: usize,
        /// Elbow threshold on the relative residual drop.
        #[arg(long, default_value_t = ptd_core::dimest::DEFAULT_ELBOW_TAU)]
        tau: f64,
    },
    /// Run a built-in verification suite and print pass/fail lines.
    Verify {
        /// One of: theorem, shape, sombrero.
        #[arg(long)]
        suite: String,
        /// Also write report.txt (and sombrero data files) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a command from its manifest, reproducing outputs bitwise.
    Rerun {
        /// Path to a manifest.txt written by any command.
        manifest: PathBuf,
    },
}

fn parse_sweep(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("`{text}`: expected lo..hi"))?;
    let lo = lo.parse().map_err(|_| format!("bad sweep start `{lo}`"))?;
    let hi = hi.parse().map_err(|_| format!("bad sweep end `{hi}`"))?;
    Ok((lo, hi))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { out, config, seed } => {
            cmd_simulate(&SimulateArgs { config, seed, out })
        }
        Command::Rasterize {
            trajectory,
            out,
            resolution,
            kernel_size,
            kernel_std,
            box_side,
        } => cmd_rasterize(&RasterizeArgs {
            trajectory,
            out,
            resolution,
            kernel_size,
            kernel_std,
            box_side,
        }),
        Command::Detect {
            input,
            out,
            alpha,
            alpha_sweep,
            k,
            suppression,
            center,
        } => cmd_detect(&DetectArgs {
            input,
            out,
            alpha,
            alpha_sweep,
            k,
            suppression,
            center,
        }),
        Command::Dimest {
            input,
            out,
            ranges,
            alpha,
            dmax,
            tau,
        } => cmd_dimest(&DimestArgs {
            input,
            out,
            ranges,
            alpha,
            dmax,
            tau,
        }),
        Command::Verify { suite, out } => cmd_verify(&VerifyArgs { suite, out }),
        Command::Rerun { manifest } => cmd_rerun(&manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
