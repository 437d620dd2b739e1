//! Curvature angular moments of a pulled-back field and the moment-based
//! shape distance.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};
use crate::pushforward::ThetaField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MomentConfig {
    /// Highest moment order `K`.
    pub k_order: usize,
    pub theta_samples: usize,
    pub r_samples: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            k_order: 3,
            theta_samples: 512,
            r_samples: 64,
            r_min: 0.05,
            r_max: 0.95,
        }
    }
}

impl MomentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_order == 0 {
            return Err(PfsdmError::InvalidConfig("moment order K must be >= 1".into()));
        }
        if self.theta_samples < 128 {
            return Err(PfsdmError::InvalidConfig("at least 128 angle samples are required".into()));
        }
        if self.r_samples < 2 || !(0.0 < self.r_min && self.r_min < self.r_max && self.r_max < 1.0) {
            return Err(PfsdmError::InvalidConfig(
                "radial grid needs >= 2 samples with 0 < r_min < r_max < 1".into(),
            ));
        }
        Ok(())
    }

    /// Uniform radial grid including both end points.
    pub fn r_grid(&self) -> Vec<f64> {
        let n = self.r_samples;
        (0..n)
            .map(|i| self.r_min + (self.r_max - self.r_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Moment table for one shape: `values[k-1][i]` is `M^k(r_grid[i])`, with row
/// 0 holding the mean curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurves {
    pub shape_id: String,
    pub r_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl MomentCurves {
    pub fn k_order(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k - 1]
    }
}

/// Curvature of the graph `theta -> f(theta)` given `f'` and `f''`.
#[inline]
pub fn hypergraph_curvature(d1: f64, d2: f64) -> f64 {
    d2.abs() / (1.0 + d1 * d1).powf(1.5)
}

pub fn curvature<F: ThetaField + ?Sized>(field: &F, theta: f64, r: f64) -> Result<f64> {
    let j = field.theta_jet(theta, r)?;
    Ok(hypergraph_curvature(j.d1, j.d2))
}

/// Mean and centered moments of `samples` up to order `k_order`; entry 0 is
/// the mean.
pub fn centered_moments(samples: &[f64], k_order: usize) -> Vec<f64> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut out = vec![mean];
    for k in 2..=k_order {
        out.push(samples.iter().map(|&v| (v - mean).powi(k as i32)).sum::<f64>() / n);
    }
    out
}

/// Curvature angular moments on a uniform periodic angle grid (trapezoidal
/// rule, which reduces to the sample mean).
pub fn angular_moments<F: ThetaField + Sync + ?Sized>(
    field: &F,
    shape_id: &str,
    cfg: &MomentConfig,
) -> Result<MomentCurves> {
    cfg.validate()?;
    let r_grid = cfg.r_grid();
    let n_theta = cfg.theta_samples;
    let per_radius: Vec<Vec<f64>> = r_grid
        .par_iter()
        .map(|&r| {
            let kappa = (0..n_theta)
                .map(|j| curvature(field, TAU * j as f64 / n_theta as f64, r))
                .collect::<Result<Vec<f64>>>()?;
            Ok(centered_moments(&kappa, cfg.k_order))
        })
        .collect::<Result<_>>()?;
    let values = (0..cfg.k_order)
        .map(|k| per_radius.iter().map(|m| m[k]).collect())
        .collect();
    Ok(MomentCurves {
        shape_id: shape_id.to_string(),
        r_grid,
        values,
    })
}

/// Cohort-wide `m_k = max_{r, i} |M^k_i(r)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizingConstants {
    pub values: Vec<f64>,
}

fn check_compatible(a: &MomentCurves, b: &MomentCurves) -> Result<()> {
    if a.r_grid != b.r_grid {
        return Err(PfsdmError::IncompatibleCurves(format!(
            "`{}` and `{}` use different radial grids",
            a.shape_id, b.shape_id
        )));
    }
    if a.values.iter().chain(&b.values).any(|row| row.len() != a.r_grid.len()) {
        return Err(PfsdmError::IncompatibleCurves("row length differs from radial grid".into()));
    }
    Ok(())
}

pub fn normalizing_constants(curves: &[MomentCurves]) -> Result<NormalizingConstants> {
    let first = curves
        .first()
        .ok_or_else(|| PfsdmError::IncompatibleCurves("empty cohort".into()))?;
    for c in curves {
        check_compatible(first, c)?;
        if c.k_order() != first.k_order() {
            return Err(PfsdmError::IncompatibleCurves(format!(
                "`{}` has {} moment rows, `{}` has {}",
                c.shape_id,
                c.k_order(),
                first.shape_id,
                first.k_order()
            )));
        }
    }
    let values: Vec<f64> = (0..first.k_order())
        .map(|k| {
            curves
                .iter()
                .flat_map(|c| c.values[k].iter())
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        })
        .collect();
    if let Some(k) = values.iter().position(|&m| !(m > 0.0)) {
        return Err(PfsdmError::DegenerateCohort(k + 1));
    }
    Ok(NormalizingConstants { values })
}

/// Trapezoidal rule for samples `f` on the (possibly non-uniform) grid `x`.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

/// `sum_{k=1..K} (1/m_k) * int (M^k_a - M^k_b)^2 dr`.
pub fn pf_sdm_distance(
    a: &MomentCurves,
    b: &MomentCurves,
    m: &NormalizingConstants,
    k_order: usize,
) -> Result<f64> {
    check_compatible(a, b)?;
    if k_order == 0 || k_order > a.k_order() || k_order > b.k_order() || k_order > m.values.len() {
        return Err(PfsdmError::IncompatibleCurves(format!(
            "order {k_order} exceeds the available moments"
        )));
    }
    let mut total = 0.0;
    for k in 0..k_order {
        let sq: Vec<f64> = a.values[k]
            .iter()
            .zip(&b.values[k])
            .map(|(x, y)| (x - y) * (x - y))
            .collect();
        total += trapezoid(&a.r_grid, &sq) / m.values[k];
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub shape_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.shape_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Pairwise distances; the upper triangle is computed and mirrored.
pub fn distance_matrix(
    curves: &[MomentCurves],
    m: &NormalizingConstants,
    k_order: usize,
) -> Result<DistanceMatrix> {
    let n = curves.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let upper = pairs
        .par_iter()
        .map(|&(i, j)| pf_sdm_distance(&curves[i], &curves[j], m, k_order))
        .collect::<Result<Vec<f64>>>()?;
    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(upper) {
        values[i][j] = d;
        values[j][i] = d;
    }
    Ok(DistanceMatrix {
        shape_ids: curves.iter().map(|c| c.shape_id.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pushforward::ThetaJet;
    use std::f64::consts::PI;

    struct CosField;

    impl ThetaField for CosField {
        fn theta_jet(&self, theta: f64, _r: f64) -> Result<ThetaJet> {
            Ok(ThetaJet {
                value: theta.cos(),
                d1: -theta.sin(),
                d2: -theta.cos(),
            })
        }
    }

    struct FlatField;

    impl ThetaField for FlatField {
        fn theta_jet(&self, _theta: f64, r: f64) -> Result<ThetaJet> {
            Ok(ThetaJet {
                value: r - 1.0,
                d1: 0.0,
                d2: 0.0,
            })
        }
    }

    fn curves(id: &str, rows: Vec<Vec<f64>>) -> MomentCurves {
        MomentCurves {
            shape_id: id.into(),
            r_grid: (0..rows[0].len()).map(|i| 0.1 + 0.1 * i as f64).collect(),
            values: rows,
        }
    }

    #[test]
    fn cosine_field_curvature() {
        assert!((curvature(&CosField, 0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(curvature(&CosField, PI / 2.0, 0.5).unwrap().abs() < 1e-15);
        assert!((curvature(&CosField, PI, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let t: f64 = 0.7;
        let expected = t.cos().abs() / (1.0 + t.sin().powi(2)).powf(1.5);
        assert!((curvature(&CosField, t, 0.5).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn flat_field_has_zero_moments() {
        let m = angular_moments(&FlatField, "flat", &MomentConfig::default()).unwrap();
        assert_eq!(m.k_order(), 3);
        assert_eq!(m.r_grid.len(), 64);
        assert!(m.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn centered_moment_values() {
        let m = centered_moments(&[1.0, 2.0, 3.0, 6.0], 3);
        assert_eq!(m[0], 3.0);
        assert_eq!(m[1], (4.0 + 1.0 + 0.0 + 9.0) / 4.0);
        assert_eq!(m[2], (-8.0 - 1.0 + 0.0 + 27.0) / 4.0);
    }

    #[test]
    fn config_validation() {
        let bad = MomentConfig {
            theta_samples: 64,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MomentConfig {
            r_min: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let g = MomentConfig::default().r_grid();
        assert_eq!(g[0], 0.05);
        assert!((g[63] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn constants_single_and_duplicate_cohorts() {
        let a = curves("a", vec![vec![1.0, 2.0, 0.5], vec![0.1, -0.4, 0.2]]);
        let single = normalizing_constants(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single.values, vec![2.0, 0.4]);
        let dup = normalizing_constants(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(dup, single);
        let zero = curves("z", vec![vec![1.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]]);
        assert!(matches!(normalizing_constants(&[zero]), Err(PfsdmError::DegenerateCohort(2))));
        assert!(normalizing_constants(&[]).is_err());
    }

    #[test]
    fn distance_identity_symmetry_and_mismatch() {
        let a = curves("a", vec![vec![1.0, 2.0, 0.5], vec![0.1, -0.4, 0.2]]);
        let b = curves("b", vec![vec![0.7, 1.0, 0.9], vec![0.3, 0.1, -0.2]]);
        let m = normalizing_constants(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(pf_sdm_distance(&a, &a, &m, 2).unwrap(), 0.0);
        let dab = pf_sdm_distance(&a, &b, &m, 2).unwrap();
        assert_eq!(dab, pf_sdm_distance(&b, &a, &m, 2).unwrap());
        // hand computation: k=1 integrand (0.09, 1, 0.16) -> 0.05*(0.09+1)+0.05*(1+0.16)
        let k1 = (0.05 * 1.09 + 0.05 * 1.16) / 2.0;
        let k2 = (0.05 * (0.04 + 0.25) + 0.05 * (0.25 + 0.16)) / 0.4;
        assert!((dab - (k1 + k2)).abs() < 1e-14);
        assert!(pf_sdm_distance(&a, &b, &m, 3).is_err());
        let mut c = b.clone();
        c.r_grid[1] = 0.25;
        assert!(matches!(
            pf_sdm_distance(&a, &c, &m, 1),
            Err(PfsdmError::IncompatibleCurves(_))
        ));
    }

    #[test]
    fn matrix_small_cases() {
        let a = curves("a", vec![vec![1.0, 2.0, 0.5]]);
        let m = normalizing_constants(std::slice::from_ref(&a)).unwrap();
        let one = distance_matrix(std::slice::from_ref(&a), &m, 1).unwrap();
        assert_eq!(one.values, vec![vec![0.0]]);
        let dup = distance_matrix(&[a.clone(), a.clone()], &m, 1).unwrap();
        assert!(dup.get(0, 1) <= 1e-10);
    }
}
