use nalgebra::{DMatrix, DVector};

use super::{BasisRow, PolySurrogate};
use crate::error::{PfsdmError, Result};
use crate::geometry::Point;

pub const DEFAULT_RIDGE: f64 = 1e-10;

/// Relative pivot size below which an unregularized system is rejected.
const RANK_TOLERANCE: f64 = 1e-12;

/// Ridge-regularized least-squares fit of a tensor-degree-`degree`
/// polynomial to `(point, value)` targets.
///
/// Minimizes `sum (p(q_i) - v_i)^2 + ridge * |coeffs|^2` through a Householder
/// QR of the stacked system `[A; sqrt(ridge) I]`.
pub fn fit_least_squares(targets: &[(Point, f64)], degree: usize, ridge: f64) -> Result<PolySurrogate> {
    fit_weighted_least_squares(targets, &vec![1.0; targets.len()], degree, ridge)
}

/// As [`fit_least_squares`] with per-target weights `w_i` on the squared
/// residuals.
pub fn fit_weighted_least_squares(
    targets: &[(Point, f64)],
    weights: &[f64],
    degree: usize,
    ridge: f64,
) -> Result<PolySurrogate> {
    if weights.len() != targets.len() || weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(PfsdmError::InvalidConfig("weights must be positive, one per target".into()));
    }
    let dim = PolySurrogate::dimension(degree);
    if targets.len() < dim {
        return Err(PfsdmError::IllConditioned(format!(
            "{} targets for {dim} coefficients",
            targets.len()
        )));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(PfsdmError::InvalidConfig(format!("ridge must be >= 0, got {ridge}")));
    }
    let rows = targets.len() + if ridge > 0.0 { dim } else { 0 };
    let mut a = DMatrix::<f64>::zeros(rows, dim);
    let mut b = DVector::<f64>::zeros(rows);
    for (r, (&(q, v), w)) in targets.iter().zip(weights).enumerate() {
        let sw = w.sqrt();
        for (c, bv) in BasisRow::values(degree, q).into_iter().enumerate() {
            a[(r, c)] = sw * bv;
        }
        b[r] = sw * v;
    }
    if ridge > 0.0 {
        let s = ridge.sqrt();
        for k in 0..dim {
            a[(targets.len() + k, k)] = s;
        }
    }
    let coeffs = solve_qr(a, b)?;
    PolySurrogate::new(degree, coeffs)
}

/// Least-squares solution of an overdetermined system via QR, rejecting
/// numerically rank-deficient `R`.
pub(crate) fn solve_qr(a: DMatrix<f64>, b: DVector<f64>) -> Result<Vec<f64>> {
    let n = a.ncols();
    let qr = a.qr();
    let r = qr.r();
    let max_pivot = (0..n).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    if !(max_pivot > 0.0) {
        return Err(PfsdmError::IllConditioned("zero design matrix".into()));
    }
    if let Some(k) = (0..n).find(|&k| r[(k, k)].abs() <= RANK_TOLERANCE * max_pivot) {
        return Err(PfsdmError::IllConditioned(format!(
            "rank-deficient design matrix (pivot {k})"
        )));
    }
    let qtb = qr.q().transpose() * b;
    let x = r
        .solve_upper_triangular(&qtb.rows(0, n).into_owned())
        .ok_or_else(|| PfsdmError::IllConditioned("singular triangular factor".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(PfsdmError::IllConditioned("non-finite solution".into()));
    }
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_points(k: usize) -> Vec<Point> {
        let mut v = Vec::new();
        for i in 0..k {
            for j in 0..k {
                v.push(Point::new(
                    -0.9 + 1.8 * i as f64 / (k - 1) as f64,
                    -0.9 + 1.8 * j as f64 / (k - 1) as f64,
                ));
            }
        }
        v
    }

    #[test]
    fn exact_recovery() {
        let truth = PolySurrogate::from_monomials(2, &[((2, 0), 1.0), ((0, 1), 1.0)]).unwrap();
        let targets: Vec<(Point, f64)> = grid_points(5).into_iter().map(|q| (q, truth.eval(q))).collect();
        let fit = fit_least_squares(&targets, 2, 0.0).unwrap();
        for (a, b) in fit.coeffs().iter().zip(truth.coeffs()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn underdetermined() {
        let targets: Vec<(Point, f64)> = grid_points(2).into_iter().map(|q| (q, 1.0)).collect();
        assert!(matches!(
            fit_least_squares(&targets, 2, 0.0),
            Err(PfsdmError::IllConditioned(_))
        ));
    }

    #[test]
    fn rank_deficient_without_ridge() {
        // all samples on the line y = 0 cannot identify y-dependence
        let targets: Vec<(Point, f64)> = (0..20)
            .map(|k| (Point::new(-0.9 + 0.09 * k as f64, 0.0), 1.0))
            .collect();
        assert!(matches!(
            fit_least_squares(&targets, 1, 0.0),
            Err(PfsdmError::IllConditioned(_))
        ));
        assert!(fit_least_squares(&targets, 1, 1e-10).is_ok());
    }
}
