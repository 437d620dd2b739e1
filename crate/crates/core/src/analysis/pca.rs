use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};
use crate::moments::DistanceMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub shape_ids: Vec<String>,
    /// `coords[i][c]` is shape `i` on component `c`.
    pub coords: Vec<Vec<f64>>,
    /// Fraction of total variance carried by each component.
    pub explained: Vec<f64>,
}

/// PCA of the rows of a distance matrix, each row used as the shape's
/// feature vector.
pub fn pca_rows(d: &DistanceMatrix, components: usize) -> Result<Embedding> {
    let mut e = pca(&d.values, components)?;
    e.shape_ids = d.shape_ids.clone();
    Ok(e)
}

/// Principal components of `rows` from the symmetric eigendecomposition of
/// the sample covariance. Components are ordered by decreasing variance and
/// signed so the largest-magnitude loading is positive.
pub fn pca(rows: &[Vec<f64>], components: usize) -> Result<Embedding> {
    let n = rows.len();
    if n < 3 {
        return Err(PfsdmError::DegenerateEmbedding(format!("PCA needs at least 3 rows, got {n}")));
    }
    let p = rows[0].len();
    if rows.iter().any(|r| r.len() != p) {
        return Err(PfsdmError::DegenerateEmbedding("rows differ in length".into()));
    }
    if components == 0 || components > p {
        return Err(PfsdmError::InvalidConfig(format!("cannot extract {components} of {p} components")));
    }
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let mean = x.row_mean();
    let centered = DMatrix::from_fn(n, p, |i, j| x[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / (n - 1) as f64;
    let total = cov.trace();
    if !(total > 0.0) {
        return Err(PfsdmError::DegenerateEmbedding("rows have zero variance".into()));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut coords = vec![Vec::with_capacity(components); n];
    let mut explained = Vec::with_capacity(components);
    for &c in order.iter().take(components) {
        let mut v = eig.eigenvectors.column(c).into_owned();
        let lead = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            v.neg_mut();
        }
        let scores = &centered * v;
        for (i, s) in scores.iter().enumerate() {
            coords[i].push(*s);
        }
        explained.push((eig.eigenvalues[c] / total).clamp(0.0, 1.0));
    }
    Ok(Embedding {
        shape_ids: (0..n).map(|i| i.to_string()).collect(),
        coords,
        explained,
    })
}
