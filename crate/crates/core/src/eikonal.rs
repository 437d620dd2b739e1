//! Polynomial solution of the viscous Eikonal equation
//! `|grad u|^2 + nu * Lap u = 1` in `(-1,1)^2` with `u = 0` on the contour.
//!
//! The discretized loss
//!
//! ```text
//! L(c) = sum_q w_q (|grad u(x_q)|^2 + nu Lap u(x_q) - 1)^2 + lambda_b sum_s w_s u(x_s)^2
//! ```
//!
//! is a sum of squares of residuals that are quadratic in the coefficients, so
//! it is minimized with a Levenberg–Marquardt damped Gauss–Newton iteration
//! using the exact Jacobian. The iteration starts from a least-squares fit of
//! the brute-force signed distance, which selects the branch that is negative
//! inside.

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};
use crate::geometry::Point;
use crate::polybasis::{
    fit_least_squares, gauss_grid, line_quadrature, BasisRow, Jet, PolySurrogate, DEFAULT_RIDGE,
};
use crate::shapes::{signed_distance_oracle, Contour};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Tensor degree of the surrogate.
    pub degree: usize,
    /// Gauss–Legendre nodes per axis.
    pub q_per_axis: usize,
    pub boundary_weight: f64,
    pub viscosity: f64,
    pub max_iterations: usize,
    /// Initial Levenberg–Marquardt damping.
    pub damping: f64,
    /// Stop once an accepted step lowers the loss by less than this fraction.
    pub tolerance: f64,
    /// Ridge used by the initial signed-distance fit.
    pub ridge: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            degree: 10,
            q_per_axis: 24,
            boundary_weight: 100.0,
            viscosity: 0.2,
            max_iterations: 60,
            damping: 1e-3,
            tolerance: 1e-10,
            ridge: DEFAULT_RIDGE,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(PfsdmError::InvalidConfig(what.to_string()));
        if self.degree == 0 {
            return bad("degree must be >= 1");
        }
        if self.q_per_axis < 4 {
            return bad("q_per_axis must be >= 4");
        }
        if !(self.boundary_weight > 0.0) || !(self.viscosity > 0.0) || !(self.damping > 0.0) {
            return bad("boundary weight, viscosity and damping must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance must lie in (0, 1)");
        }
        if !(self.ridge >= 0.0) {
            return bad("ridge must be >= 0");
        }
        Ok(())
    }
}

/// Solved signed-distance surrogate and its solve statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdfModel {
    pub poly: PolySurrogate,
    pub viscosity: f64,
    /// Area-weighted RMS of the PDE residual over the quadrature grid.
    pub pde_rms: f64,
    /// Arc-length-weighted RMS of the surrogate on the contour.
    pub boundary_rms: f64,
    pub contour_id: String,
    pub converged: bool,
    pub iterations: usize,
    pub initial_loss: f64,
    pub loss: f64,
}

impl SdfModel {
    pub fn eval(&self, q: Point) -> f64 {
        self.poly.eval(q)
    }

    pub fn grad(&self, q: Point) -> (f64, f64) {
        self.poly.grad(q)
    }

    pub fn laplacian(&self, q: Point) -> f64 {
        self.poly.laplacian(q)
    }

    pub fn jet(&self, q: Point) -> Jet {
        self.poly.jet(q)
    }
}

/// Loss values of the initial iterate and of every accepted step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub accepted_losses: Vec<f64>,
    pub rejected_steps: usize,
}

/// Least-squares fit of the brute-force signed distance sampled at the
/// quadrature nodes.
pub fn init_sdf(c: &Contour, cfg: &SolverConfig) -> Result<PolySurrogate> {
    cfg.validate()?;
    c.check_solver_ready()?;
    let grid = gauss_grid(cfg.q_per_axis)?;
    let targets: Vec<(Point, f64)> = grid
        .nodes
        .iter()
        .map(|&q| (q, signed_distance_oracle(q, c)))
        .collect();
    fit_least_squares(&targets, cfg.degree, cfg.ridge)
}

/// Residual assembly for one contour and configuration.
pub struct EikonalProblem {
    viscosity: f64,
    area_dx: DMatrix<f64>,
    area_dy: DMatrix<f64>,
    area_lap: DMatrix<f64>,
    area_sqrt_w: DVector<f64>,
    area_weight_sum: f64,
    boundary: DMatrix<f64>,
    boundary_sqrt_w: DVector<f64>,
    boundary_w: DVector<f64>,
    boundary_length: f64,
}

impl EikonalProblem {
    pub fn new(c: &Contour, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        c.check_solver_ready()?;
        let grid = gauss_grid(cfg.q_per_axis)?;
        let line = line_quadrature(c);
        let dim = PolySurrogate::dimension(cfg.degree);
        let nq = grid.len();
        let mut area_dx = DMatrix::zeros(nq, dim);
        let mut area_dy = DMatrix::zeros(nq, dim);
        let mut area_lap = DMatrix::zeros(nq, dim);
        for (r, &q) in grid.nodes.iter().enumerate() {
            let row = BasisRow::new(cfg.degree, q);
            for k in 0..dim {
                area_dx[(r, k)] = row.dx[k];
                area_dy[(r, k)] = row.dy[k];
                area_lap[(r, k)] = row.laplacian[k];
            }
        }
        let ns = line.nodes.len();
        let mut boundary = DMatrix::zeros(ns, dim);
        for (r, &q) in line.nodes.iter().enumerate() {
            for (k, v) in BasisRow::values(cfg.degree, q).into_iter().enumerate() {
                boundary[(r, k)] = v;
            }
        }
        Ok(Self {
            viscosity: cfg.viscosity,
            area_dx,
            area_dy,
            area_lap,
            area_sqrt_w: DVector::from_iterator(nq, grid.weights.iter().map(|w| w.sqrt())),
            area_weight_sum: grid.weights.iter().sum(),
            boundary,
            boundary_sqrt_w: DVector::from_iterator(
                ns,
                line.weights.iter().map(|w| (cfg.boundary_weight * w).sqrt()),
            ),
            boundary_w: DVector::from_column_slice(&line.weights),
            boundary_length: line.total_length(),
        })
    }

    fn n_area(&self) -> usize {
        self.area_dx.nrows()
    }

    /// Unweighted PDE residual at each quadrature node.
    pub fn pde_residuals(&self, c: &DVector<f64>) -> DVector<f64> {
        let ux = &self.area_dx * c;
        let uy = &self.area_dy * c;
        let lap = &self.area_lap * c;
        DVector::from_iterator(
            self.n_area(),
            (0..self.n_area()).map(|q| ux[q] * ux[q] + uy[q] * uy[q] + self.viscosity * lap[q] - 1.0),
        )
    }

    /// Weighted residual vector whose squared norm is the loss.
    pub fn residuals(&self, c: &DVector<f64>) -> DVector<f64> {
        let pde = self.pde_residuals(c);
        let bnd = &self.boundary * c;
        let nq = self.n_area();
        let mut r = DVector::zeros(nq + bnd.len());
        for q in 0..nq {
            r[q] = self.area_sqrt_w[q] * pde[q];
        }
        for s in 0..bnd.len() {
            r[nq + s] = self.boundary_sqrt_w[s] * bnd[s];
        }
        r
    }

    pub fn loss(&self, c: &DVector<f64>) -> f64 {
        self.residuals(c).norm_squared()
    }

    pub fn jacobian(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let ux = &self.area_dx * c;
        let uy = &self.area_dy * c;
        let nq = self.n_area();
        let ns = self.boundary.nrows();
        let dim = c.len();
        let mut j = DMatrix::zeros(nq + ns, dim);
        for q in 0..nq {
            let (a, b, sw) = (2.0 * ux[q], 2.0 * uy[q], self.area_sqrt_w[q]);
            for k in 0..dim {
                j[(q, k)] = sw
                    * (a * self.area_dx[(q, k)]
                        + b * self.area_dy[(q, k)]
                        + self.viscosity * self.area_lap[(q, k)]);
            }
        }
        for s in 0..ns {
            let sw = self.boundary_sqrt_w[s];
            for k in 0..dim {
                j[(nq + s, k)] = sw * self.boundary[(s, k)];
            }
        }
        j
    }

    /// `(pde_rms, boundary_rms)` of a coefficient vector.
    pub fn rms(&self, c: &DVector<f64>) -> (f64, f64) {
        let pde = self.pde_residuals(c);
        let pde_ss: f64 = (0..pde.len())
            .map(|q| (self.area_sqrt_w[q] * pde[q]).powi(2))
            .sum();
        let bnd = &self.boundary * c;
        let bnd_ss: f64 = (0..bnd.len())
            .map(|s| self.boundary_w[s] * bnd[s] * bnd[s])
            .sum();
        (
            (pde_ss / self.area_weight_sum).sqrt(),
            (bnd_ss / self.boundary_length).sqrt(),
        )
    }
}

/// Solves the viscous Eikonal problem for `c`.
pub fn solve_eikonal(c: &Contour, cfg: &SolverConfig) -> Result<SdfModel> {
    solve_eikonal_traced(c, cfg, "").map(|(m, _)| m)
}

/// As [`solve_eikonal`], tagging the model with `contour_id` and returning the
/// per-step loss trace.
pub fn solve_eikonal_traced(
    c: &Contour,
    cfg: &SolverConfig,
    contour_id: &str,
) -> Result<(SdfModel, SolveTrace)> {
    let problem = EikonalProblem::new(c, cfg)?;
    let init = init_sdf(c, cfg)?;
    let mut coeffs = DVector::from_column_slice(init.coeffs());
    let mut loss = problem.loss(&coeffs);
    if !loss.is_finite() {
        return Err(PfsdmError::SolverDiverged("non-finite initial loss".into()));
    }
    let initial_loss = loss;
    let mut trace = SolveTrace {
        accepted_losses: vec![loss],
        rejected_steps: 0,
    };
    let mut mu = cfg.damping;
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < cfg.max_iterations {
        iterations += 1;
        let r = problem.residuals(&coeffs);
        let j = problem.jacobian(&coeffs);
        let jtj = j.tr_mul(&j);
        let grad = j.tr_mul(&r);
        if grad.amax() <= f64::EPSILON * loss.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        let diag_floor = jtj.diagonal().amax() * 1e-12;
        loop {
            let mut damped = jtj.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += mu * jtj[(k, k)].max(diag_floor);
            }
            let step = damped.cholesky().map(|ch| ch.solve(&(-&grad)));
            if let Some(step) = step {
                let candidate = &coeffs + &step;
                let cand_loss = problem.loss(&candidate);
                if cand_loss.is_finite() && cand_loss < loss {
                    let rel = (loss - cand_loss) / loss;
                    coeffs = candidate;
                    loss = cand_loss;
                    trace.accepted_losses.push(loss);
                    mu = (mu / 3.0).max(1e-15);
                    debug!("eikonal iter {iterations}: loss {loss:.6e} mu {mu:.1e}");
                    if rel < cfg.tolerance {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
            }
            trace.rejected_steps += 1;
            mu *= 4.0;
            if mu > 1e16 {
                // no descent direction left at working precision
                converged = true;
                break 'outer;
            }
        }
    }

    if !loss.is_finite() {
        return Err(PfsdmError::SolverDiverged("non-finite loss".into()));
    }
    let (pde_rms, boundary_rms) = problem.rms(&coeffs);
    let poly = PolySurrogate::new(cfg.degree, coeffs.iter().copied().collect())?;
    Ok((
        SdfModel {
            poly,
            viscosity: cfg.viscosity,
            pde_rms,
            boundary_rms,
            contour_id: contour_id.to_string(),
            converged,
            iterations,
            initial_loss,
            loss,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{generate_shape, ShapeKind};

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            viscosity: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(PfsdmError::InvalidConfig(_))));
        let bad = SolverConfig {
            tolerance: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let c = generate_shape(ShapeKind::Folded, 64, 0).unwrap();
        let cfg = SolverConfig {
            degree: 4,
            q_per_axis: 8,
            ..Default::default()
        };
        let p = EikonalProblem::new(&c, &cfg).unwrap();
        let x = DVector::from_iterator(25, (0..25).map(|k| ((k * 37) % 11) as f64 / 11.0 - 0.5));
        let j = p.jacobian(&x);
        let h = 1e-6;
        for k in [0, 3, 12, 24] {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (p.residuals(&xp) - p.residuals(&xm)) / (2.0 * h);
            let err = (fd - j.column(k)).amax();
            assert!(err < 1e-6, "column {k}: {err}");
        }
    }

    #[test]
    fn underparameterized_circle_has_large_residual() {
        let c = generate_shape(ShapeKind::Circle, 128, 0).unwrap();
        let cfg = SolverConfig {
            degree: 1,
            q_per_axis: 8,
            max_iterations: 10,
            ..Default::default()
        };
        let init = init_sdf(&c, &cfg).unwrap();
        let p = EikonalProblem::new(&c, &cfg).unwrap();
        let (pde_rms, _) = p.rms(&DVector::from_column_slice(init.coeffs()));
        assert!(pde_rms > 0.5, "{pde_rms}");
    }

    #[test]
    fn rejects_short_contours() {
        let tri = Contour::from_xy(&[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]).unwrap();
        assert!(solve_eikonal(&tri, &SolverConfig::default()).is_err());
    }
}
