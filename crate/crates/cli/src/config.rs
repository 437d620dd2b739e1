use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use pfsdm_core::analysis::PipelineConfig;
use pfsdm_core::{PfsdmError, Result};
use serde::{Deserialize, Serialize};

/// Flags shared by every subcommand. Each one overrides the matching value
/// from `--config`, which in turn overrides the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Tensor degree of the SDF surrogate.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Tensor degree of the deformation polynomials.
    #[arg(long = "def-degree", global = true)]
    pub def_degree: Option<usize>,
    #[arg(long, global = true)]
    pub viscosity: Option<f64>,
    /// Gauss-Legendre nodes per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long = "boundary-weight", global = true)]
    pub boundary_weight: Option<f64>,
    #[arg(long = "theta-samples", global = true)]
    pub theta_samples: Option<usize>,
    #[arg(long = "r-samples", global = true)]
    pub r_samples: Option<usize>,
    #[arg(long = "k-order", global = true)]
    pub k_order: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file with a partial run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Complete configuration of one invocation, recorded next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub pipeline: PipelineConfig,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            pipeline: PipelineConfig::default(),
            seed: 0,
            jobs: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command.to_string();
        let p = &mut cfg.pipeline;
        if let Some(v) = args.degree {
            p.solver.degree = v;
        }
        if let Some(v) = args.def_degree {
            p.deformation.degree = v;
        }
        if let Some(v) = args.viscosity {
            p.solver.viscosity = v;
        }
        if let Some(v) = args.grid {
            p.solver.q_per_axis = v;
        }
        if let Some(v) = args.boundary_weight {
            p.solver.boundary_weight = v;
        }
        if let Some(v) = args.theta_samples {
            p.moments.theta_samples = v;
        }
        if let Some(v) = args.r_samples {
            p.moments.r_samples = v;
        }
        if let Some(v) = args.k_order {
            p.moments.k_order = v;
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if args.jobs.is_some() {
            cfg.jobs = args.jobs;
        }
        if cfg.jobs == Some(0) {
            return Err(PfsdmError::InvalidConfig("--jobs must be >= 1".into()));
        }
        cfg.pipeline.validate()?;
        Ok(cfg)
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| PfsdmError::InvalidConfig(format!("{}: {e}", path.display())))
}
