use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svg::{line_plot, scatter_plot, Series};
use super::{build_corpus, class_medoids, clustering_score, pca_rows, shape_moments, ClusterScores, Embedding, PipelineConfig};
use crate::error::Result;
use crate::io::{distance_matrix_to_csv, format_float, moments_to_csv, write_atomic, write_json};
use crate::moments::{distance_matrix, normalizing_constants, DistanceMatrix, MomentCurves, NormalizingConstants};
use crate::shapes::{generate_shape, AugmentParams, ShapeKind};

/// Points per canonical shape.
const CANONICAL_POINTS: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Experiment1Report {
    pub curves: Vec<MomentCurves>,
    pub constants: NormalizingConstants,
    pub distances: DistanceMatrix,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Experiment2Report {
    pub seed: u64,
    pub labels: Vec<ShapeKind>,
    pub curves: Vec<MomentCurves>,
    pub constants: NormalizingConstants,
    pub distances: DistanceMatrix,
    pub embedding: Embedding,
    pub scores: ClusterScores,
    /// Corpus index of each class medoid, in `ShapeKind::ALL` order.
    pub medoids: Vec<(ShapeKind, usize)>,
    /// Distance-matrix entries between class medoids.
    pub medoid_distances: Vec<Vec<f64>>,
    /// Class whose medoid has the largest mean distance to the other medoids.
    pub farthest_class: ShapeKind,
    pub closest_pair: (ShapeKind, ShapeKind),
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    experiment: &'a str,
    config: &'a PipelineConfig,
    #[serde(flatten)]
    extra: T,
    files: Vec<String>,
}

struct Writer<'a> {
    root: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn text(&mut self, rel: &str, body: &str) -> Result<()> {
        write_atomic(&self.root.join(rel), body.as_bytes())?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        write_json(&self.root.join(rel), value)?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn manifest<T: Serialize>(&mut self, experiment: &str, config: &PipelineConfig, extra: T) -> Result<()> {
        let m = Manifest {
            experiment,
            config,
            extra,
            files: self.files.iter().map(|p| p.display().to_string()).collect(),
        };
        self.json("manifest.json", &m)
    }
}

/// Moment curves of the five canonical shapes, raw and in normalized absolute
/// form `|M^k| / m_k`, with one plot per order.
pub fn run_experiment1(out_dir: &Path, cfg: &PipelineConfig) -> Result<Experiment1Report> {
    cfg.validate()?;
    let curves = ShapeKind::ALL
        .par_iter()
        .map(|&kind| {
            info!("experiment 1: {}", kind.name());
            let c = generate_shape(kind, CANONICAL_POINTS, 0)?;
            shape_moments(&c, kind.name(), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let constants = normalizing_constants(&curves)?;
    let distances = distance_matrix(&curves, &constants, cfg.moments.k_order)?;

    let mut w = Writer { root: out_dir, files: Vec::new() };
    for c in &curves {
        w.text(&format!("moments/{}.csv", c.shape_id), &moments_to_csv(c))?;
    }
    let mut normalized = Vec::new();
    for c in &curves {
        let rows: Vec<Vec<f64>> = c
            .values
            .iter()
            .zip(&constants.values)
            .map(|(row, m)| row.iter().map(|v| v.abs() / m).collect())
            .collect();
        for (k, row) in rows.iter().enumerate() {
            let mut s = format!("r,M{}\n", k + 1);
            for (r, v) in c.r_grid.iter().zip(row) {
                let _ = writeln!(s, "{},{}", format_float(*r), format_float(*v));
            }
            w.text(&format!("normalized/{}_M{}.csv", c.shape_id, k + 1), &s)?;
        }
        normalized.push(rows);
    }
    for k in 0..cfg.moments.k_order {
        let series: Vec<Series> = curves
            .iter()
            .zip(&normalized)
            .map(|(c, rows)| Series {
                label: &c.shape_id,
                xs: &c.r_grid,
                ys: &rows[k],
            })
            .collect();
        let svg = line_plot(
            &format!("Normalized moment |M{0}| / m{0}", k + 1),
            "r",
            &format!("|M{}| / m{}", k + 1, k + 1),
            &series,
        );
        w.text(&format!("plots/moments_M{}.svg", k + 1), &svg)?;
    }
    w.text("distmat.csv", &distance_matrix_to_csv(&distances))?;

    #[derive(Serialize)]
    struct Extra<'a> {
        shapes: Vec<&'static str>,
        normalizing_constants: &'a [f64],
    }
    w.manifest(
        "1",
        cfg,
        Extra {
            shapes: ShapeKind::ALL.iter().map(|k| k.name()).collect(),
            normalizing_constants: &constants.values,
        },
    )?;
    Ok(Experiment1Report {
        curves,
        constants,
        distances,
        files: w.files,
    })
}

/// Robustness experiment: augmented corpus, distance matrix, PCA of its rows
/// and clustering scores.
pub fn run_experiment2(seed: u64, out_dir: &Path, cfg: &PipelineConfig) -> Result<Experiment2Report> {
    cfg.validate()?;
    let corpus = build_corpus(seed)?;
    let curves = corpus
        .entries
        .par_iter()
        .map(|e| {
            info!("experiment 2: {}", e.shape_id);
            shape_moments(&e.contour, &e.shape_id, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = corpus.labels();
    let constants = normalizing_constants(&curves)?;
    let distances = distance_matrix(&curves, &constants, cfg.moments.k_order)?;
    let embedding = pca_rows(&distances, 2)?;
    let scores = clustering_score(&distances.values, &labels)?;

    let medoids = class_medoids(&distances.values, &labels);
    let medoid_distances: Vec<Vec<f64>> = medoids
        .iter()
        .map(|&(_, i)| medoids.iter().map(|&(_, j)| distances.values[i][j]).collect())
        .collect();
    let nc = medoids.len();
    let mean_to_others: Vec<f64> = (0..nc)
        .map(|a| medoid_distances[a].iter().sum::<f64>() / (nc - 1) as f64)
        .collect();
    let farthest = (0..nc).fold(0, |b, a| if mean_to_others[a] > mean_to_others[b] { a } else { b });
    let mut closest = (0, 1);
    for a in 0..nc {
        for b in a + 1..nc {
            if medoid_distances[a][b] < medoid_distances[closest.0][closest.1] {
                closest = (a, b);
            }
        }
    }
    let farthest_class = medoids[farthest].0;
    let closest_pair = (medoids[closest.0].0, medoids[closest.1].0);

    let mut w = Writer { root: out_dir, files: Vec::new() };
    for c in &curves {
        w.text(&format!("moments/{}.csv", c.shape_id), &moments_to_csv(c))?;
    }
    w.text("distmat.csv", &distance_matrix_to_csv(&distances))?;
    let mut emb = String::from("id,label,pc1,pc2\n");
    for ((id, label), xy) in embedding.shape_ids.iter().zip(&labels).zip(&embedding.coords) {
        let _ = writeln!(emb, "{id},{},{},{}", label.label(), format_float(xy[0]), format_float(xy[1]));
    }
    w.text("embedding.csv", &emb)?;

    #[derive(Serialize)]
    struct Scores<'a> {
        nearest_medoid_accuracy: f64,
        silhouette: f64,
        explained_variance: &'a [f64],
        medoids: Vec<(&'static str, &'a str)>,
        medoid_distances: &'a [Vec<f64>],
        farthest_class: &'static str,
        closest_pair: (&'static str, &'static str),
    }
    w.json(
        "scores.json",
        &Scores {
            nearest_medoid_accuracy: scores.accuracy,
            silhouette: scores.silhouette,
            explained_variance: &embedding.explained,
            medoids: medoids.iter().map(|&(k, i)| (k.label(), curves[i].shape_id.as_str())).collect(),
            medoid_distances: &medoid_distances,
            farthest_class: farthest_class.label(),
            closest_pair: (closest_pair.0.label(), closest_pair.1.label()),
        },
    )?;
    let points: Vec<(f64, f64, usize)> = embedding
        .coords
        .iter()
        .zip(&labels)
        .map(|(xy, l)| (xy[0], xy[1], ShapeKind::ALL.iter().position(|k| k == l).unwrap_or(0)))
        .collect();
    let legend: Vec<String> = ShapeKind::ALL.iter().map(|k| format!("{} {}", k.label(), k.name())).collect();
    let svg = scatter_plot(
        "Distance-matrix rows, first two principal components",
        &format!("PC1 ({:.1}%)", 100.0 * embedding.explained[0]),
        &format!("PC2 ({:.1}%)", 100.0 * embedding.explained[1]),
        &points,
        &legend.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    w.text("plots/embedding.svg", &svg)?;

    #[derive(Serialize)]
    struct Extra<'a> {
        seed: u64,
        corpus: Vec<(&'a str, &'static str, AugmentParams)>,
    }
    w.manifest(
        "2",
        cfg,
        Extra {
            seed,
            corpus: corpus
                .entries
                .iter()
                .map(|e| (e.shape_id.as_str(), e.label.label(), e.params))
                .collect(),
        },
    )?;
    Ok(Experiment2Report {
        seed,
        labels,
        curves,
        constants,
        distances,
        embedding,
        scores,
        medoids,
        medoid_distances,
        farthest_class,
        closest_pair,
        files: w.files,
    })
}
