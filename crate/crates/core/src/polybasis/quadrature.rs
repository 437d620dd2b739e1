use super::legendre::gauss_legendre;
use crate::error::{PfsdmError, Result};
use crate::geometry::Point;
use crate::shapes::Contour;

/// Tensor Gauss–Legendre rule on `(-1,1)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&p, w)| w * f(p)).sum()
    }
}

/// `q_per_axis`-point tensor Gauss–Legendre grid; exact for polynomials of
/// degree `2 q - 1` in each variable.
pub fn gauss_grid(q_per_axis: usize) -> Result<QuadratureGrid> {
    if q_per_axis < 4 {
        return Err(PfsdmError::InvalidConfig(format!(
            "quadrature needs at least 4 nodes per axis, got {q_per_axis}"
        )));
    }
    let (x, w) = gauss_legendre(q_per_axis);
    let mut nodes = Vec::with_capacity(q_per_axis * q_per_axis);
    let mut weights = Vec::with_capacity(q_per_axis * q_per_axis);
    for (xi, wi) in x.iter().zip(&w) {
        for (yj, wj) in x.iter().zip(&w) {
            nodes.push(Point::new(*xi, *yj));
            weights.push(wi * wj);
        }
    }
    Ok(QuadratureGrid { nodes, weights })
}

/// Trapezoidal arc-length rule on a closed polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct LineQuadrature {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl LineQuadrature {
    pub fn total_length(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&p, w)| w * f(p)).sum()
    }
}

/// Each vertex gets half the length of its two incident segments.
pub fn line_quadrature(c: &Contour) -> LineQuadrature {
    let pts = c.points();
    let n = pts.len();
    let seg: Vec<f64> = (0..n).map(|i| pts[i].distance(pts[(i + 1) % n])).collect();
    let weights = (0..n).map(|i| 0.5 * (seg[(i + n - 1) % n] + seg[i])).collect();
    LineQuadrature {
        nodes: pts.to_vec(),
        weights,
    }
}
