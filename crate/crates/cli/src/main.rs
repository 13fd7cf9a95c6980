//! `ldes`: synthesize, compose, bake and apply lens-distortion STMaps.

mod commands;
mod keyframes;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ldes", version, about = "Lens distortion STMap toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Exr,
    Tif,
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    Bilinear,
    CatmullRom,
}

#[derive(Args)]
struct Output {
    /// Output file, or an existing directory to receive an auto-named file
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Container for auto-named outputs
    #[arg(long, value_enum, default_value = "exr")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a view map from a params file
    GenView {
        params: PathBuf,
        /// Frame size as WIDTHxHEIGHT
        #[arg(long)]
        size: String,
        /// Store the natural vignette in the B channel
        #[arg(long)]
        vignette: bool,
        /// Overrides the params file description
        #[arg(long)]
        desc: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Synthesize a footage map from a params file or derive one from a view map
    GenFootage {
        #[arg(required_unless_present = "from_view", conflicts_with = "from_view")]
        params: Option<PathBuf>,
        #[arg(long)]
        from_view: Option<PathBuf>,
        /// Edge of the square map; defaults to 1024 for params files and the
        /// next power of two of the view map otherwise
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        desc: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Normalize two view maps to a common FOV and blend them
    Blend {
        a: PathBuf,
        b: PathBuf,
        /// Opacity of B, or keyframes `frame:opacity,...` for a sequence
        #[arg(long)]
        opacity: String,
        /// Common FOV in whole degrees; defaults to the larger label
        #[arg(long)]
        common_fov: Option<u32>,
        #[arg(long, default_value = "Blend")]
        desc: String,
        #[command(flatten)]
        output: Output,
    },
    /// Bake a view map and a footage map into the final STMap
    Bake {
        view_map: PathBuf,
        footage_map: PathBuf,
        #[arg(long, value_enum, default_value = "bilinear")]
        filter: Filter,
        #[arg(long, default_value_t = 1)]
        supersample: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Sample footage through an STMap
    Apply {
        footage: PathBuf,
        stmap: PathBuf,
        #[arg(long, value_enum, default_value = "bilinear")]
        filter: Filter,
        /// Mirror the STMap's t coordinate (top-down hosts)
        #[arg(long)]
        flip_t: bool,
        /// Zero alpha where the STMap points outside the footage
        #[arg(long)]
        mark_outside: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Convert a view map into unit incidence vectors
    Rays {
        view_map: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Rotate the camera behind a view map (degrees)
    Rotate {
        view_map: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        pan: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tilt: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        roll: f64,
        #[arg(long)]
        desc: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Remove or add a view map's vignette on linear footage
    Vignette {
        footage: PathBuf,
        view_map: PathBuf,
        #[arg(long, conflicts_with = "multiply", required_unless_present = "multiply")]
        divide: bool,
        #[arg(long)]
        multiply: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Fit projection parameters to correspondences
    Fit {
        correspondences: PathBuf,
        seed: PathBuf,
        /// Comma-separated parameter names, e.g. omega,k,squeeze
        #[arg(long)]
        free: String,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        /// Fitted params file
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write the report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the metadata encoded in an LDES file name
    Info { path: PathBuf },
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("LDES_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("LDES_THREADS must be a positive integer, got `{value}`"))?;
        if n == 0 {
            anyhow::bail!("LDES_THREADS must be a positive integer, got `{value}`");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ldes: {e:#}");
            ExitCode::FAILURE
        }
    }
}
