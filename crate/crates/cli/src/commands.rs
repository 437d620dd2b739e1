use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use pfsdm_core::analysis::{build_field, run_experiment1, run_experiment2};
use pfsdm_core::eikonal::solve_eikonal_traced;
use pfsdm_core::io::{
    contour_from_csv, contour_to_csv, distance_matrix_to_csv, moments_from_csv, moments_to_csv, to_json,
    write_atomic, write_json,
};
use pfsdm_core::moments::{angular_moments, distance_matrix, normalizing_constants};
use pfsdm_core::pushforward::PfSdfField;
use pfsdm_core::shapes::{
    extract_contour, generate_shape, normalize_contour, pixel_to_domain, rasterize, resample_contour, Contour,
    RasterImage, ShapeKind,
};
use pfsdm_core::{PfsdmError, Result};
use serde::{Deserialize, Serialize};

use crate::config::{CommonArgs, RunConfig};
use crate::Command;

fn read_contour(path: &Path) -> Result<Contour> {
    contour_from_csv(&fs::read_to_string(path)?)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "shape".into())
}

/// `<out>.run.json`, recording the configuration behind a non-JSON output.
fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    PathBuf::from(name)
}

fn write_with_sidecar(out: &Path, body: &[u8], cfg: &RunConfig) -> Result<()> {
    write_atomic(out, body)?;
    write_json(&sidecar(out), cfg)
}

/// Serializes `value` as a JSON object with the run configuration embedded
/// under `run_config`.
fn write_json_with_config<T: Serialize>(out: &Path, value: &T, cfg: &RunConfig) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("run_config".into(), serde_json::to_value(cfg)?);
    }
    write_atomic(out, to_json(&v)?.as_bytes())
}

#[derive(Deserialize)]
struct Cohort {
    shape_ids: Vec<String>,
}

pub fn run(command: Command, args: &CommonArgs) -> Result<()> {
    let name = match &command {
        Command::Gen { .. } => "gen",
        Command::Sdf { .. } => "sdf",
        Command::Pfsdf { .. } => "pfsdf",
        Command::Moments { .. } => "moments",
        Command::Distmat { .. } => "distmat",
        Command::Exp1 { .. } => "exp1",
        Command::Exp2 { .. } => "exp2",
        Command::Extract { .. } => "extract",
        Command::Raster { .. } => "raster",
    };
    let mut cfg = RunConfig::resolve(name, args)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| PfsdmError::InvalidConfig(e.to_string()))?;
    }

    match command {
        Command::Gen { kind, points, out } => {
            let kind: ShapeKind = kind.parse()?;
            cfg.outputs = vec![out.clone()];
            let c = generate_shape(kind, points, cfg.seed)?;
            write_with_sidecar(&out, contour_to_csv(&c).as_bytes(), &cfg)
        }
        Command::Sdf { contour, out, raw } => {
            cfg.inputs = vec![contour.clone()];
            cfg.outputs = vec![out.clone()];
            let mut c = read_contour(&contour)?;
            if !raw {
                c = normalize_contour(&resample_contour(&c, cfg.pipeline.resample_points)?)?;
            }
            let (model, trace) = solve_eikonal_traced(&c, &cfg.pipeline.solver, &file_stem(&contour))?;
            info!(
                "solved in {} iterations ({} rejected), pde_rms {:.3e}, boundary_rms {:.3e}",
                model.iterations, trace.rejected_steps, model.pde_rms, model.boundary_rms
            );
            write_json_with_config(&out, &model, &cfg)
        }
        Command::Pfsdf { contour, out } => {
            cfg.inputs = vec![contour.clone()];
            cfg.outputs = vec![out.clone()];
            let c = read_contour(&contour)?;
            let field = build_field(&c, &file_stem(&contour), &cfg.pipeline)?;
            write_json_with_config(&out, &field, &cfg)
        }
        Command::Moments { bundle, out } => {
            cfg.inputs = vec![bundle.clone()];
            cfg.outputs = vec![out.clone()];
            let field: PfSdfField = serde_json::from_str(&fs::read_to_string(&bundle)?)
                .map_err(|e| PfsdmError::Format(format!("{}: {e}", bundle.display())))?;
            let id = field.contour_id().to_string();
            let curves = angular_moments(&field, &id, &cfg.pipeline.moments)?;
            write_with_sidecar(&out, moments_to_csv(&curves).as_bytes(), &cfg)
        }
        Command::Distmat { curves_dir, cohort, out } => {
            cfg.inputs = vec![curves_dir.clone(), cohort.clone()];
            cfg.outputs = vec![out.clone()];
            let cohort: Cohort = serde_json::from_str(&fs::read_to_string(&cohort)?)
                .map_err(|e| PfsdmError::Format(format!("{}: {e}", cohort.display())))?;
            if cohort.shape_ids.is_empty() {
                return Err(PfsdmError::Format("cohort lists no shapes".into()));
            }
            let curves = cohort
                .shape_ids
                .iter()
                .map(|id| moments_from_csv(&fs::read_to_string(curves_dir.join(format!("{id}.csv")))?, id))
                .collect::<Result<Vec<_>>>()?;
            let m = normalizing_constants(&curves)?;
            let d = distance_matrix(&curves, &m, cfg.pipeline.moments.k_order)?;
            write_with_sidecar(&out, distance_matrix_to_csv(&d).as_bytes(), &cfg)
        }
        Command::Exp1 { out } => {
            cfg.outputs = vec![out.clone()];
            let report = run_experiment1(&out, &cfg.pipeline)?;
            info!("normalizing constants {:?}", report.constants.values);
            write_json(&out.join("run.json"), &cfg)
        }
        Command::Exp2 { out } => {
            cfg.outputs = vec![out.clone()];
            let report = run_experiment2(cfg.seed, &out, &cfg.pipeline)?;
            info!(
                "accuracy {:.3}, silhouette {:.3}",
                report.scores.accuracy, report.scores.silhouette
            );
            write_json(&out.join("run.json"), &cfg)
        }
        Command::Extract { image, threshold, out } => {
            cfg.inputs = vec![image.clone()];
            cfg.outputs = vec![out.clone()];
            let file = fs::File::open(&image)?;
            let img = RasterImage::read_pgm(std::io::BufReader::new(file))?;
            let c = pixel_to_domain(&extract_contour(&img, threshold)?, img.width())?;
            write_with_sidecar(&out, contour_to_csv(&c).as_bytes(), &cfg)
        }
        Command::Raster { contour, side, out } => {
            cfg.inputs = vec![contour.clone()];
            cfg.outputs = vec![out.clone()];
            let img = rasterize(&read_contour(&contour)?, side)?;
            let mut buf = Vec::new();
            img.write_pgm(&mut buf)?;
            write_with_sidecar(&out, &buf, &cfg)
        }
    }
}
