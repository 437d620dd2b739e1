//! Synthetic corpora, the per-shape pipeline and the two experiment drivers.

mod cluster;
mod experiments;
mod pca;
pub mod svg;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::eikonal::{solve_eikonal_traced, SolverConfig};
use crate::error::{PfsdmError, Result};
use crate::moments::{angular_moments, MomentConfig, MomentCurves};
use crate::pushforward::{fit_deformation, DeformationConfig, PfSdfField};
use crate::rng::SeededStream;
use crate::shapes::{augment, generate_shape, normalize_contour, resample_contour, AugmentParams, Contour, ShapeKind};

pub use cluster::{class_medoids, clustering_score, ClusterScores};
pub use experiments::{run_experiment1, run_experiment2, Experiment1Report, Experiment2Report};
pub use pca::{pca, pca_rows, Embedding};

/// Everything that determines a shape's moment curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Points per contour after arc-length resampling.
    pub resample_points: usize,
    pub solver: SolverConfig,
    pub deformation: DeformationConfig,
    pub moments: MomentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            resample_points: 256,
            solver: SolverConfig::default(),
            deformation: DeformationConfig::default(),
            moments: MomentConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.moments.validate()?;
        if self.deformation.degree == 0 {
            return Err(PfsdmError::InvalidConfig("deformation degree must be >= 1".into()));
        }
        Ok(())
    }
}

/// Resamples and normalizes `c`, then builds its push-forward field.
pub fn build_field(c: &Contour, shape_id: &str, cfg: &PipelineConfig) -> Result<PfSdfField> {
    let c = normalize_contour(&resample_contour(c, cfg.resample_points)?)?;
    let (sdf, _) = solve_eikonal_traced(&c, &cfg.solver, shape_id)?;
    let map = fit_deformation(&c, &cfg.deformation, shape_id)?;
    PfSdfField::new(sdf, map)
}

/// Full contour-to-moments pipeline for one shape.
pub fn shape_moments(c: &Contour, shape_id: &str, cfg: &PipelineConfig) -> Result<MomentCurves> {
    let field = build_field(c, shape_id, cfg)?;
    angular_moments(&field, shape_id, &cfg.moments)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub shape_id: String,
    pub label: ShapeKind,
    pub params: AugmentParams,
    pub contour: Contour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn labels(&self) -> Vec<ShapeKind> {
        self.entries.iter().map(|e| e.label).collect()
    }
}

pub const CORPUS_PER_CLASS: usize = 10;
pub const CORPUS_POINTS: usize = 256;
pub const SCALE_RANGE: (f64, f64) = (0.6, 1.4);
const MAX_TRANSLATION: f64 = 0.3;
const MAX_DRAWS: usize = 1000;

/// Draws augmentation parameters for a contour of circumradius `radius`
/// until the result fits inside the domain.
pub fn random_augmentation(c: &Contour, rng: &mut SeededStream, seed: u64) -> Result<(AugmentParams, Contour)> {
    for _ in 0..MAX_DRAWS {
        let rotation = rng.uniform(0.0, TAU);
        let scale = rng.uniform(SCALE_RANGE.0, SCALE_RANGE.1);
        let reflect = rng.coin();
        let tx = rng.uniform(-MAX_TRANSLATION, MAX_TRANSLATION);
        let ty = rng.uniform(-MAX_TRANSLATION, MAX_TRANSLATION);
        let params = AugmentParams {
            rotation,
            translation: (tx, ty),
            scale,
            reflect,
            seed,
        };
        match augment(c, &params) {
            Ok(out) => return Ok((params, out)),
            Err(PfsdmError::OutOfDomain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PfsdmError::DegenerateShape("no in-domain augmentation found".into()))
}

/// Ten augmented copies of each canonical shape, fully determined by `seed`.
///
/// Each entry samples its base shape with its own phase jitter before
/// augmentation, so no two entries share contour points.
pub fn build_corpus(seed: u64) -> Result<Corpus> {
    build_corpus_sized(seed, CORPUS_PER_CLASS)
}

pub fn build_corpus_sized(seed: u64, per_class: usize) -> Result<Corpus> {
    let mut rng = SeededStream::new(seed);
    let mut entries = Vec::with_capacity(per_class * ShapeKind::ALL.len());
    for kind in ShapeKind::ALL {
        for i in 0..per_class {
            let entry_seed = rng.next_u64() | 1;
            let base = generate_shape(kind, CORPUS_POINTS, entry_seed)?;
            let (params, contour) = random_augmentation(&base, &mut rng, entry_seed)?;
            entries.push(CorpusEntry {
                shape_id: format!("{}_{:02}", kind.label(), i),
                label: kind,
                params,
                contour,
            });
        }
    }
    Ok(Corpus { seed, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_contract() {
        let c = build_corpus(42).unwrap();
        assert_eq!(c.entries.len(), 50);
        for kind in ShapeKind::ALL {
            assert_eq!(c.entries.iter().filter(|e| e.label == kind).count(), 10);
        }
        assert!(c.entries.iter().all(|e| e.contour.inside_domain()));
        assert!(c
            .entries
            .iter()
            .all(|e| (0.6..1.4).contains(&e.params.scale) && (0.0..TAU).contains(&e.params.rotation)));
        assert!(c.entries.iter().any(|e| e.params.reflect));
        assert!(c.entries.iter().any(|e| !e.params.reflect));
    }

    #[test]
    fn corpus_determinism() {
        assert_eq!(build_corpus(42).unwrap(), build_corpus(42).unwrap());
        let a: Vec<AugmentParams> = build_corpus(1).unwrap().entries.iter().map(|e| e.params).collect();
        let b: Vec<AugmentParams> = build_corpus(2).unwrap().entries.iter().map(|e| e.params).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn pipeline_rejects_bad_config() {
        let cfg = PipelineConfig {
            moments: MomentConfig {
                k_order: 0,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(PipelineConfig::default().validate().is_ok());
    }
}
