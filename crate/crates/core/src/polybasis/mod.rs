//! Bivariate polynomial surrogates on `(-1,1)^2`.
//!
//! Polynomials of tensor degree `n` are stored in the tensor Legendre basis
//! `P_i(x) P_j(y)`, `0 <= i, j <= n`. This spans the same space as the
//! monomials `x^i y^j` but stays well conditioned at the degrees used here.

mod legendre;
mod lsq;
mod quadrature;

pub use legendre::{gauss_legendre, monomial_in_legendre, LegendreTable};
pub use lsq::{fit_least_squares, fit_weighted_least_squares, DEFAULT_RIDGE};
pub use quadrature::{gauss_grid, line_quadrature, LineQuadrature, QuadratureGrid};

use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};
use crate::geometry::Point;

pub const BASIS_NAME: &str = "legendre-tensor";

/// Value and derivatives up to second order at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Jet {
    pub fn gradient(&self) -> (f64, f64) {
        (self.dx, self.dy)
    }

    pub fn laplacian(&self) -> f64 {
        self.dxx + self.dyy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct PolySurrogate {
    degree: usize,
    /// Row-major `(degree+1) x (degree+1)`; entry `(i, j)` multiplies `P_i(x) P_j(y)`.
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    basis: String,
    degree: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<PolyJson> for PolySurrogate {
    type Error = PfsdmError;
    fn try_from(j: PolyJson) -> Result<Self> {
        if j.basis != BASIS_NAME {
            return Err(PfsdmError::Format(format!(
                "unsupported polynomial basis `{}`",
                j.basis
            )));
        }
        PolySurrogate::new(j.degree, j.coeffs)
    }
}

impl From<PolySurrogate> for PolyJson {
    fn from(p: PolySurrogate) -> Self {
        PolyJson {
            basis: BASIS_NAME.to_string(),
            degree: p.degree,
            coeffs: p.coeffs,
        }
    }
}

impl PolySurrogate {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(PfsdmError::InvalidConfig("polynomial degree must be >= 1".into()));
        }
        let dim = (degree + 1) * (degree + 1);
        if coeffs.len() != dim {
            return Err(PfsdmError::Format(format!(
                "degree {degree} needs {dim} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PfsdmError::Format("non-finite polynomial coefficient".into()));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn zeros(degree: usize) -> Result<Self> {
        Self::new(degree, vec![0.0; Self::dimension(degree)])
    }

    /// Builds a polynomial from monomial terms `((a, b), c)` meaning `c x^a y^b`.
    pub fn from_monomials(degree: usize, terms: &[((usize, usize), f64)]) -> Result<Self> {
        let mut p = Self::zeros(degree)?;
        for &((a, b), c) in terms {
            if a > degree || b > degree {
                return Err(PfsdmError::InvalidConfig(format!(
                    "monomial x^{a} y^{b} exceeds degree {degree}"
                )));
            }
            let (la, lb) = (monomial_in_legendre(a), monomial_in_legendre(b));
            for (i, ci) in la.iter().enumerate() {
                for (j, cj) in lb.iter().enumerate() {
                    p.coeffs[i * (degree + 1) + j] += c * ci * cj;
                }
            }
        }
        Ok(p)
    }

    /// Number of basis functions for tensor degree `degree`.
    pub fn dimension(degree: usize) -> usize {
        (degree + 1) * (degree + 1)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * (self.degree + 1) + j]
    }

    pub fn eval(&self, q: Point) -> f64 {
        let tx = LegendreTable::new(q.x, self.degree);
        let ty = LegendreTable::new(q.y, self.degree);
        let n1 = self.degree + 1;
        let mut acc = 0.0;
        for i in 0..n1 {
            let row = &self.coeffs[i * n1..(i + 1) * n1];
            let inner: f64 = row.iter().zip(&ty.value).map(|(c, p)| c * p).sum();
            acc += tx.value[i] * inner;
        }
        acc
    }

    pub fn grad(&self, q: Point) -> (f64, f64) {
        self.jet(q).gradient()
    }

    pub fn laplacian(&self, q: Point) -> f64 {
        self.jet(q).laplacian()
    }

    pub fn jet(&self, q: Point) -> Jet {
        let tx = LegendreTable::new(q.x, self.degree);
        let ty = LegendreTable::new(q.y, self.degree);
        let n1 = self.degree + 1;
        let mut jet = Jet::default();
        for i in 0..n1 {
            let row = &self.coeffs[i * n1..(i + 1) * n1];
            let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
            for (j, &c) in row.iter().enumerate() {
                v += c * ty.value[j];
                d1 += c * ty.d1[j];
                d2 += c * ty.d2[j];
            }
            jet.value += tx.value[i] * v;
            jet.dx += tx.d1[i] * v;
            jet.dy += tx.value[i] * d1;
            jet.dxx += tx.d2[i] * v;
            jet.dxy += tx.d1[i] * d1;
            jet.dyy += tx.value[i] * d2;
        }
        jet
    }
}

/// Basis functions and their derivatives evaluated at one point, in the
/// coefficient order of [`PolySurrogate`].
#[derive(Debug, Clone)]
pub struct BasisRow {
    pub value: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub laplacian: Vec<f64>,
}

impl BasisRow {
    pub fn new(degree: usize, q: Point) -> Self {
        let tx = LegendreTable::new(q.x, degree);
        let ty = LegendreTable::new(q.y, degree);
        let dim = PolySurrogate::dimension(degree);
        let mut row = BasisRow {
            value: Vec::with_capacity(dim),
            dx: Vec::with_capacity(dim),
            dy: Vec::with_capacity(dim),
            laplacian: Vec::with_capacity(dim),
        };
        for i in 0..=degree {
            for j in 0..=degree {
                row.value.push(tx.value[i] * ty.value[j]);
                row.dx.push(tx.d1[i] * ty.value[j]);
                row.dy.push(tx.value[i] * ty.d1[j]);
                row.laplacian.push(tx.d2[i] * ty.value[j] + tx.value[i] * ty.d2[j]);
            }
        }
        row
    }

    /// Values only, for least-squares design matrices.
    pub fn values(degree: usize, q: Point) -> Vec<f64> {
        let tx = LegendreTable::new(q.x, degree);
        let ty = LegendreTable::new(q.y, degree);
        let mut out = Vec::with_capacity(PolySurrogate::dimension(degree));
        for i in 0..=degree {
            for j in 0..=degree {
                out.push(tx.value[i] * ty.value[j]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2_plus_y() -> PolySurrogate {
        PolySurrogate::from_monomials(2, &[((2, 0), 1.0), ((0, 1), 1.0)]).unwrap()
    }

    #[test]
    fn zero_and_constant() {
        let z = PolySurrogate::zeros(4).unwrap();
        assert_eq!(z.eval(Point::new(0.3, -0.8)), 0.0);
        let mut c = vec![0.0; 25];
        c[0] = 3.0;
        let p = PolySurrogate::new(4, c).unwrap();
        for q in [Point::new(0.0, 0.0), Point::new(-1.0, 1.0), Point::new(0.41, 0.97)] {
            assert_eq!(p.eval(q), 3.0);
            assert_eq!(p.grad(q), (0.0, 0.0));
            assert_eq!(p.laplacian(q), 0.0);
        }
    }

    #[test]
    fn x2_plus_y_values() {
        let p = x2_plus_y();
        assert!((p.eval(Point::new(0.5, 0.25)) - 0.5).abs() < 1e-15);
        let (gx, gy) = p.grad(Point::new(0.5, 0.0));
        assert!((gx - 1.0).abs() < 1e-14 && (gy - 1.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_closed_forms() {
        let p = PolySurrogate::from_monomials(3, &[((2, 0), 1.0), ((0, 2), 1.0)]).unwrap();
        for q in [Point::new(0.1, 0.2), Point::new(-0.9, 0.7)] {
            assert!((p.laplacian(q) - 4.0).abs() < 1e-13);
        }
        let lin = PolySurrogate::from_monomials(3, &[((1, 0), 2.0), ((0, 1), -1.0), ((0, 0), 0.5)])
            .unwrap();
        assert!(lin.laplacian(Point::new(0.3, 0.3)).abs() < 1e-14);
    }

    #[test]
    fn mixed_derivative() {
        // x^2 y^3: dxy = 6 x y^2
        let p = PolySurrogate::from_monomials(3, &[((2, 3), 1.0)]).unwrap();
        let j = p.jet(Point::new(0.4, -0.5));
        assert!((j.dxy - 6.0 * 0.4 * 0.25).abs() < 1e-13);
    }

    #[test]
    fn basis_row_matches_jet() {
        let coeffs: Vec<f64> = (0..36).map(|k| ((k * 7919) % 13) as f64 / 13.0 - 0.5).collect();
        let p = PolySurrogate::new(5, coeffs.clone()).unwrap();
        let q = Point::new(0.33, -0.61);
        let row = BasisRow::new(5, q);
        let dot = |v: &[f64]| v.iter().zip(&coeffs).map(|(a, b)| a * b).sum::<f64>();
        let jet = p.jet(q);
        assert!((dot(&row.value) - jet.value).abs() < 1e-13);
        assert!((dot(&row.dx) - jet.dx).abs() < 1e-12);
        assert!((dot(&row.dy) - jet.dy).abs() < 1e-12);
        assert!((dot(&row.laplacian) - jet.laplacian()).abs() < 1e-11);
        assert_eq!(BasisRow::values(5, q), row.value);
    }

    #[test]
    fn json_round_trip_and_basis_check() {
        let p = x2_plus_y();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"basis\":\"legendre-tensor\""));
        let back: PolySurrogate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = s.replace("legendre-tensor", "monomial");
        assert!(serde_json::from_str::<PolySurrogate>(&bad).is_err());
    }

    #[test]
    fn invalid_construction() {
        assert!(PolySurrogate::new(0, vec![1.0]).is_err());
        assert!(PolySurrogate::new(2, vec![0.0; 8]).is_err());
        assert!(PolySurrogate::new(1, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
