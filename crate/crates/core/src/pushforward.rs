//! Deformation of the unit disk onto a shape and the pulled-back signed
//! distance field over polar coordinates `(theta, r)`.
//!
//! The map is `Psi(theta, r) = p + disp(p)` with `p = (r cos theta, r sin theta)`
//! and `disp` a pair of polynomials. `disp` is fitted so that each projected
//! circle point `b = s / |s|` is carried onto its contour sample `s`, with the
//! displacement scaled linearly towards zero at the disk center. The zero level
//! set of `phi(Psi(theta, r))` then sits on `r = 1`.

use std::f64::consts::TAU;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::eikonal::SdfModel;
use crate::error::{PfsdmError, Result};
use crate::geometry::Point;
use crate::polybasis::{fit_weighted_least_squares, Jet, PolySurrogate, DEFAULT_RIDGE};
use crate::shapes::{signed_distance_oracle, Contour};

/// Zero-level residual above which the map is flagged as possibly not
/// invertible.
pub const NOT_INVERTIBLE_THRESHOLD: f64 = 0.1;

/// Angular resolution used to measure the zero-level residual.
pub const ZERO_RESIDUAL_SAMPLES: usize = 512;

/// Centroid offset tolerated by [`fit_deformation`].
const CENTERED_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeformationConfig {
    pub degree: usize,
    /// Radii at which the displacement is pinned to `r * d`.
    pub interior_radii: Vec<f64>,
    /// Pin `disp(0, 0) = (0, 0)`.
    pub anchor_origin: bool,
    /// Weight of the contour targets relative to interior and origin targets.
    pub boundary_weight: f64,
    pub ridge: f64,
}

impl Default for DeformationConfig {
    fn default() -> Self {
        Self {
            degree: 10,
            interior_radii: (1..20).map(|i| 0.05 * i as f64).collect(),
            anchor_origin: true,
            boundary_weight: 100.0,
            ridge: DEFAULT_RIDGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushForwardMap {
    pub disp_x: PolySurrogate,
    pub disp_y: PolySurrogate,
    /// Max over a uniform angle grid of `|d_S(Psi(theta, 1))|`, where `d_S` is
    /// the brute-force signed distance to the fitted contour.
    pub zero_residual: f64,
    pub not_invertible: bool,
    pub contour_id: String,
}

/// Position and angular derivatives of `Psi` at one `(theta, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet {
    pub point: Point,
    pub d_theta: Point,
    pub d_theta2: Point,
}

impl PushForwardMap {
    pub fn push(&self, theta: f64, r: f64) -> Point {
        let p = Point::new(r * theta.cos(), r * theta.sin());
        p + Point::new(self.disp_x.eval(p), self.disp_y.eval(p))
    }

    pub fn jet(&self, theta: f64, r: f64) -> MapJet {
        let (s, c) = theta.sin_cos();
        let p = Point::new(r * c, r * s);
        let t = Point::new(-r * s, r * c);
        let jx = self.disp_x.jet(p);
        let jy = self.disp_y.jet(p);
        let lin = |j: &Jet, v: Point| j.dx * v.x + j.dy * v.y;
        let quad = |j: &Jet, v: Point| j.dxx * v.x * v.x + 2.0 * j.dxy * v.x * v.y + j.dyy * v.y * v.y;
        // d/dtheta p = t, d^2/dtheta^2 p = -p
        MapJet {
            point: p + Point::new(jx.value, jy.value),
            d_theta: t + Point::new(lin(&jx, t), lin(&jy, t)),
            d_theta2: -p + Point::new(quad(&jx, t) - lin(&jx, p), quad(&jy, t) - lin(&jy, p)),
        }
    }
}

/// Unit-circle closest point to `q`.
pub fn closest_point_circle(q: Point) -> Result<Point> {
    let n = q.norm();
    if n < 1e-12 {
        return Err(PfsdmError::UndefinedProjection);
    }
    Ok(q * (1.0 / n))
}

/// Fits the disk-to-shape displacement for a centered contour.
pub fn fit_deformation(c: &Contour, cfg: &DeformationConfig, contour_id: &str) -> Result<PushForwardMap> {
    c.check_solver_ready()?;
    let centroid = c
        .centroid()
        .ok_or_else(|| PfsdmError::DegenerateShape("contour encloses zero area".into()))?;
    if centroid.norm() > CENTERED_TOLERANCE {
        return Err(PfsdmError::InvalidContour(format!(
            "deformation fit needs a centered contour, centroid is ({:.3e}, {:.3e})",
            centroid.x, centroid.y
        )));
    }
    if cfg.interior_radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(PfsdmError::InvalidConfig("interior radii must lie in (0, 1)".into()));
    }

    let mut tx = Vec::new();
    let mut ty = Vec::new();
    let mut w = Vec::new();
    for &s in c.points() {
        let b = closest_point_circle(s)?;
        let d = s - b;
        tx.push((b, d.x));
        ty.push((b, d.y));
        w.push(cfg.boundary_weight);
        for &r in &cfg.interior_radii {
            tx.push((b * r, d.x * r));
            ty.push((b * r, d.y * r));
            w.push(1.0);
        }
    }
    if cfg.anchor_origin {
        tx.push((Point::ORIGIN, 0.0));
        ty.push((Point::ORIGIN, 0.0));
        w.push(1.0);
    }
    let disp_x = fit_weighted_least_squares(&tx, &w, cfg.degree, cfg.ridge)?;
    let disp_y = fit_weighted_least_squares(&ty, &w, cfg.degree, cfg.ridge)?;

    let mut map = PushForwardMap {
        disp_x,
        disp_y,
        zero_residual: 0.0,
        not_invertible: false,
        contour_id: contour_id.to_string(),
    };
    map.zero_residual = (0..ZERO_RESIDUAL_SAMPLES)
        .map(|k| {
            let theta = TAU * k as f64 / ZERO_RESIDUAL_SAMPLES as f64;
            signed_distance_oracle(map.push(theta, 1.0), c).abs()
        })
        .fold(0.0, f64::max);
    if !map.zero_residual.is_finite() {
        return Err(PfsdmError::IllConditioned("non-finite deformation residual".into()));
    }
    if map.zero_residual > NOT_INVERTIBLE_THRESHOLD {
        warn!(
            "deformation for `{contour_id}` misses the contour by {:.3}; map may not be invertible",
            map.zero_residual
        );
        map.not_invertible = true;
    }
    Ok(map)
}

/// Value and first two angular derivatives of a field over `(theta, r)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThetaJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A scalar field over the polar reference disk.
pub trait ThetaField {
    fn theta_jet(&self, theta: f64, r: f64) -> Result<ThetaJet>;
}

/// The pulled-back signed distance `phi(Psi(theta, r))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfSdfField {
    pub sdf: SdfModel,
    pub map: PushForwardMap,
}

impl PfSdfField {
    pub fn new(sdf: SdfModel, map: PushForwardMap) -> Result<Self> {
        if sdf.contour_id != map.contour_id {
            return Err(PfsdmError::InvalidConfig(format!(
                "SDF model `{}` and deformation `{}` describe different contours",
                sdf.contour_id, map.contour_id
            )));
        }
        Ok(Self { sdf, map })
    }

    pub fn contour_id(&self) -> &str {
        &self.sdf.contour_id
    }

    fn pushed(&self, theta: f64, r: f64) -> Result<MapJet> {
        if !(r > 0.0 && r <= 1.0) || !theta.is_finite() {
            return Err(PfsdmError::OutOfDomain(format!(
                "(theta, r) = ({theta}, {r}) is outside the reference disk"
            )));
        }
        let mj = self.map.jet(theta, r);
        if !(mj.point.x.abs() <= 1.0 && mj.point.y.abs() <= 1.0) {
            return Err(PfsdmError::OutOfDomain(format!(
                "Psi({theta:.4}, {r:.4}) = ({:.4}, {:.4})",
                mj.point.x, mj.point.y
            )));
        }
        Ok(mj)
    }

    pub fn eval(&self, theta: f64, r: f64) -> Result<f64> {
        let mj = self.pushed(theta, r)?;
        Ok(self.sdf.eval(mj.point))
    }

    /// Angular derivative of order 1 or 2.
    pub fn dtheta(&self, theta: f64, r: f64, order: u8) -> Result<f64> {
        let j = self.theta_jet(theta, r)?;
        match order {
            1 => Ok(j.d1),
            2 => Ok(j.d2),
            _ => Err(PfsdmError::InvalidConfig(format!(
                "angular derivative order must be 1 or 2, got {order}"
            ))),
        }
    }
}

impl ThetaField for PfSdfField {
    fn theta_jet(&self, theta: f64, r: f64) -> Result<ThetaJet> {
        let mj = self.pushed(theta, r)?;
        let j = self.sdf.jet(mj.point);
        let t = mj.d_theta;
        let hess = j.dxx * t.x * t.x + 2.0 * j.dxy * t.x * t.y + j.dyy * t.y * t.y;
        Ok(ThetaJet {
            value: j.value,
            d1: j.dx * t.x + j.dy * t.y,
            d2: hess + j.dx * mj.d_theta2.x + j.dy * mj.d_theta2.y,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{generate_shape, normalize_contour, ShapeKind};

    #[test]
    fn projection_examples() {
        assert_eq!(closest_point_circle(Point::new(2.0, 0.0)).unwrap(), Point::new(1.0, 0.0));
        let p = closest_point_circle(Point::new(0.3, 0.4)).unwrap();
        assert!((p.x - 0.6).abs() < 1e-15 && (p.y - 0.8).abs() < 1e-15);
        assert!(matches!(
            closest_point_circle(Point::ORIGIN),
            Err(PfsdmError::UndefinedProjection)
        ));
    }

    #[test]
    fn circle_shrinks_uniformly() {
        let c = generate_shape(ShapeKind::Circle, 256, 0).unwrap();
        let map = fit_deformation(&c, &DeformationConfig::default(), "c").unwrap();
        assert!(map.zero_residual <= 1e-2, "{}", map.zero_residual);
        assert!(!map.not_invertible);
        for k in 0..16 {
            let t = TAU * k as f64 / 16.0 + 0.1;
            let b = Point::new(t.cos(), t.sin());
            let d = Point::new(map.disp_x.eval(b), map.disp_y.eval(b));
            assert!((d - b * -0.3).norm() < 1e-2);
        }
    }

    #[test]
    fn unit_circle_is_identity_on_boundary() {
        let pts = (0..256)
            .map(|k| {
                let t = TAU * k as f64 / 256.0;
                Point::new(t.cos(), t.sin()) * (1.0 - 1e-9)
            })
            .collect();
        let c = Contour::new(pts).unwrap();
        let map = fit_deformation(&c, &DeformationConfig::default(), "u").unwrap();
        assert!(map.zero_residual <= 1e-3, "{}", map.zero_residual);
    }

    #[test]
    fn star_zero_residual() {
        let c = generate_shape(ShapeKind::Star, 256, 0).unwrap();
        let map = fit_deformation(&c, &DeformationConfig::default(), "s").unwrap();
        assert!(map.zero_residual <= 2e-2, "{}", map.zero_residual);
    }

    #[test]
    fn rejects_uncentered_contour() {
        let c = generate_shape(ShapeKind::Circle, 64, 0).unwrap();
        let shifted = Contour::new(c.points().iter().map(|&p| p + Point::new(0.1, 0.0)).collect()).unwrap();
        assert!(matches!(
            fit_deformation(&shifted, &DeformationConfig::default(), "x"),
            Err(PfsdmError::InvalidContour(_))
        ));
        assert!(fit_deformation(&normalize_contour(&shifted).unwrap(), &DeformationConfig::default(), "x").is_ok());
    }

    #[test]
    fn map_jet_matches_finite_differences() {
        let c = generate_shape(ShapeKind::Folded, 256, 0).unwrap();
        let map = fit_deformation(&c, &DeformationConfig::default(), "f").unwrap();
        let h = 1e-5;
        for &(theta, r) in &[(0.3, 0.5), (2.0, 0.9), (5.5, 0.2)] {
            let j = map.jet(theta, r);
            let (p, m) = (map.push(theta + h, r), map.push(theta - h, r));
            let d1 = (p - m) * (0.5 / h);
            let d2 = (p + m - j.point * 2.0) * (1.0 / (h * h));
            assert!((d1 - j.d_theta).norm() < 1e-7);
            assert!((d2 - j.d_theta2).norm() < 1e-4);
        }
    }
}
