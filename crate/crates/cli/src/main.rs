mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pfsdm_core::ErrorClass;

use config::CommonArgs;

#[derive(Debug, Parser)]
#[command(name = "pfsdm", version, about = "Push-forward signed distance morphometric")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic contour as `x,y` CSV.
    Gen {
        /// star, ellipse, circle, rounded_square, folded (or S1..S5)
        kind: String,
        /// Number of contour points.
        #[arg(short = 'n', long, default_value_t = 256)]
        points: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve the viscous Eikonal equation for a contour.
    Sdf {
        contour: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Solve on the contour as given instead of resampling and
        /// normalizing it first.
        #[arg(long)]
        raw: bool,
    },
    /// Solve and fit the push-forward map; writes the PF-SDF bundle.
    Pfsdf {
        contour: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Curvature angular moments of a PF-SDF bundle.
    Moments {
        bundle: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Distance matrix over a cohort of moment CSVs.
    Distmat {
        /// Directory holding `<shape_id>.csv` moment files.
        curves_dir: PathBuf,
        /// JSON file `{"shape_ids": [...]}` listing the cohort.
        #[arg(long)]
        cohort: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Moment curves of the five canonical shapes.
    Exp1 {
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Clustering of the augmented 50-shape corpus.
    Exp2 {
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Threshold a PGM image and extract its outline.
    Extract {
        image: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Rasterize a contour to a PGM image.
    Raster {
        contour: PathBuf,
        #[arg(long, default_value_t = 256)]
        side: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::InputFormat => 3,
        ErrorClass::Solver => 4,
        ErrorClass::DegenerateData => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PFSDM_LOG", "warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(exit_code(e.class()))
        }
    }
}
